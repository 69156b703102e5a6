#include "bnprdd/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "bnprdd/error.hpp"

namespace bnprdd {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError("column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int k = 0; k < bytes; ++k) out_.push_back(static_cast<char>((v >> (8 * k)) & 0xffu));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string_view raw(std::size_t n) {
    need(n);
    const auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DataError("chain file truncated at byte " + std::to_string(pos_));
  }
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int k = 0; k < bytes; ++k) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + static_cast<std::size_t>(k)])) << (8 * k);
    }
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

constexpr std::string_view kMagic = "BNPRDDC1";

}  // namespace

Dataset parse_dataset_csv(std::istream& in, const ColumnMapping& mapping, double cutoff) {
  if (!std::isfinite(cutoff)) throw DataError("cutoff must be finite");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: header row expected");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header;
  for (auto c : split(line)) header.emplace_back(c);
  const std::size_t iy = column_index(header, mapping.y);
  const std::size_t ir = column_index(header, mapping.r);
  std::optional<std::size_t> it;
  if (mapping.t) it = column_index(header, *mapping.t);

  Dataset d;
  d.cutoff = cutoff;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(cells.size()));
    }
    auto number = [&](std::size_t col) {
      const auto v = parse_number(cells[col]);
      if (!v) {
        const std::string what = cells[col].empty() ? "missing value" : "non-numeric value '" + std::string(cells[col]) + "'";
        throw DataError("line " + std::to_string(lineno) + ", column '" + header[col] + "': " + what);
      }
      if (!std::isfinite(*v)) {
        throw DataError("line " + std::to_string(lineno) + ", column '" + header[col] + "': non-finite value");
      }
      return *v;
    };
    const double y = number(iy);
    const double r = number(ir);
    int t = r >= cutoff ? 1 : 0;
    if (it) {
      const double tv = number(*it);
      if (tv != 0.0 && tv != 1.0) {
        throw DataError("line " + std::to_string(lineno) + ", column '" + header[*it] + "': treatment must be 0 or 1");
      }
      t = static_cast<int>(tv);
    }
    d.y.push_back(y);
    d.r.push_back(r);
    d.t.push_back(t);
  }
  d.validate();
  return d;
}

Dataset read_dataset_csv(const std::filesystem::path& path, const ColumnMapping& mapping, double cutoff) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return parse_dataset_csv(in, mapping, cutoff);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw NumericalError("format_double failed");
  return std::string(buf.data(), ptr);
}

std::string dataset_csv(const Dataset& data) {
  std::string out = "y,r,t\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += format_double(data.y[i]);
    out += ',';
    out += format_double(data.r[i]);
    out += ',';
    out += data.t[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string encode_chain(const PosteriorDraws& draws, std::uint32_t n_chains) {
  Writer w;
  w.raw(kMagic);
  w.u32(kChainFileVersion);
  w.u32(static_cast<std::uint32_t>(draws.kind));
  w.u64(draws.size());
  w.f64(draws.cutoff);
  w.u32(n_chains);
  w.u32(0);
  for (const auto& d : draws.draws) {
    const Parameters& p = d.params;
    w.u32(d.chain);
    w.i32(p.window.j_min());
    w.i32(p.window.j_max());
    w.u32(d.occupied);
    for (double b : p.beta) w.f64(b);
    for (double l : p.lambda) w.f64(l);
    w.f64(p.mu_mu);
    w.f64(p.sigma_mu);
    w.f64(p.b_sigma);
    for (const auto& c : p.window.components()) {
      w.f64(c.mean);
      w.f64(c.variance);
    }
  }
  return w.take();
}

PosteriorDraws decode_chain(std::string_view bytes, std::uint32_t* n_chains) {
  Reader rd(bytes);
  if (rd.raw(kMagic.size()) != kMagic) throw DataError("not a chain file (bad magic)");
  const std::uint32_t version = rd.u32();
  if (version != kChainFileVersion) throw DataError("unsupported chain file version " + std::to_string(version));
  const std::uint32_t kind = rd.u32();
  if (kind > 1) throw DataError("chain file: unknown model kind " + std::to_string(kind));
  PosteriorDraws out;
  out.kind = static_cast<ModelKind>(kind);
  const std::uint64_t count = rd.u64();
  out.cutoff = rd.f64();
  const std::uint32_t chains = rd.u32();
  rd.u32();
  if (n_chains) *n_chains = chains;
  out.draws.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, bytes.size() / 112)));
  for (std::uint64_t k = 0; k < count; ++k) {
    Draw d;
    d.chain = rd.u32();
    const std::int32_t lo = rd.i32();
    const std::int32_t hi = rd.i32();
    if (hi < lo || static_cast<std::int64_t>(hi) - lo > 1000000) throw DataError("chain file: bad window in record " + std::to_string(k));
    d.occupied = rd.u32();
    Parameters& p = d.params;
    for (double& b : p.beta) b = rd.f64();
    for (double& l : p.lambda) l = rd.f64();
    p.mu_mu = rd.f64();
    p.sigma_mu = rd.f64();
    p.b_sigma = rd.f64();
    std::vector<Component> comps(static_cast<std::size_t>(hi - lo + 1));
    for (auto& c : comps) {
      c.mean = rd.f64();
      c.variance = rd.f64();
    }
    p.window = ComponentWindow(lo, std::move(comps));
    for (int t = 0; t < 2; ++t) {
      d.eta_at_cutoff[static_cast<std::size_t>(t)] = eta(p.beta, out.cutoff, t);
      d.sigma_at_cutoff[static_cast<std::size_t>(t)] = sigma_link(p.lambda, out.cutoff, t);
    }
    out.draws.push_back(std::move(d));
  }
  if (!rd.done()) throw DataError("chain file: trailing bytes after last record");
  return out;
}

void write_chain_file(const std::filesystem::path& path, const PosteriorDraws& draws, std::uint32_t n_chains) {
  write_file_atomic(path, encode_chain(draws, n_chains));
}

PosteriorDraws read_chain_file(const std::filesystem::path& path, std::uint32_t* n_chains) {
  try {
    return decode_chain(read_file(path), n_chains);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw DataError("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bnprdd
