#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "bnprdd/error.hpp"
#include "bnprdd/io.hpp"
#include "support.hpp"

using namespace bnprdd;

namespace {

Dataset parse(const std::string& text, ColumnMapping m = {}, double cutoff = 0.0) {
  std::istringstream in(text);
  return parse_dataset_csv(in, m, cutoff);
}

std::string error_of(const std::string& text, ColumnMapping m = {}) {
  try {
    parse(text, m);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

PosteriorDraws sample_draws() {
  RandomStream rng(4);
  PosteriorDraws d;
  d.kind = ModelKind::Binary;
  d.cutoff = 0.25;
  for (std::uint32_t k = 0; k < 7; ++k) {
    ParameterState s;
    s.params = testing::random_state(rng);
    s.params.mu_mu = sample_normal(rng);
    s.params.sigma_mu = 1.5;
    s.params.b_sigma = 0.125;
    s.alloc = {s.params.window.j_min(), s.params.window.j_min()};
    Draw draw = make_draw(s, d.cutoff, k % 2);
    d.draws.push_back(draw);
  }
  return d;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("dataset parsing") {
    const Dataset d = parse("\xEF\xBB\xBFy, r ,t\n1.5,-0.5,0\n\"2\", 0.5 ,1\n\n");
    REQUIRE(d.size() == 2);
    CHECK(d.y[1] == 2.0);
    CHECK(d.r[1] == 0.5);
    CHECK(d.t[0] == 0);
    ColumnMapping m{"score", "x", std::nullopt};
    const Dataset derived = parse("x,score\n-1,3\n0,4\n2,5\n", m, 0.0);
    CHECK(derived.t == std::vector<int>{0, 1, 1});
    CHECK(derived.y == std::vector<double>{3.0, 4.0, 5.0});
  }

  TEST_CASE("dataset errors name the line and column") {
    CHECK(error_of("y,r,t\n1,0,0\n1,abc,1\n").find("line 3, column 'r'") != std::string::npos);
    CHECK(error_of("y,r,t\n1,0,0\n,1,1\n").find("missing value") != std::string::npos);
    CHECK(error_of("y,r,t\n1,-1,0\n1,1,2\n").find("0 or 1") != std::string::npos);
    CHECK(error_of("y,r,t\n1,-1,0\n1,1\n").find("line 3") != std::string::npos);
    CHECK(error_of("y,r,t\ninf,-1,0\n1,1,1\n").find("non-finite") != std::string::npos);
    CHECK(error_of("y,q,t\n1,-1,0\n").find("'r'") != std::string::npos);
    CHECK(error_of("y,r,t\n1,-1,0\n2,-2,0\n").size() > 0);
    CHECK_THROWS_AS(read_dataset_csv("/nonexistent/file.csv", {}, 0.0), DataError);
  }

  TEST_CASE("dataset csv round trip") {
    const Dataset d{{0.1, -2.5e-7, 3.0}, {-1.0 / 3.0, 0.5, 1.0}, {0, 1, 1}, 0.0};
    const Dataset back = parse(dataset_csv(d));
    CHECK(back.y == d.y);
    CHECK(back.r == d.r);
    CHECK(back.t == d.t);
  }

  TEST_CASE("chain file round trip") {
    const PosteriorDraws d = sample_draws();
    const std::string bytes = encode_chain(d, 2);
    std::uint32_t chains = 0;
    const PosteriorDraws back = decode_chain(bytes, &chains);
    CHECK(chains == 2);
    CHECK(back.kind == d.kind);
    CHECK(back.cutoff == d.cutoff);
    REQUIRE(back.size() == d.size());
    for (std::size_t k = 0; k < d.size(); ++k) {
      const auto& a = d.draws[k];
      const auto& b = back.draws[k];
      CHECK(a.chain == b.chain);
      CHECK(a.occupied == b.occupied);
      CHECK(a.params.beta == b.params.beta);
      CHECK(a.params.lambda == b.params.lambda);
      CHECK(a.params.mu_mu == b.params.mu_mu);
      CHECK(a.params.window.j_min() == b.params.window.j_min());
      REQUIRE(a.params.window.size() == b.params.window.size());
      for (std::size_t c = 0; c < a.params.window.size(); ++c) {
        CHECK(a.params.window.components()[c].mean == b.params.window.components()[c].mean);
        CHECK(a.params.window.components()[c].variance == b.params.window.components()[c].variance);
      }
      CHECK(a.eta_at_cutoff == b.eta_at_cutoff);
      CHECK(a.sigma_at_cutoff == b.sigma_at_cutoff);
    }
    CHECK(encode_chain(back, 2) == bytes);
    CHECK_THROWS(decode_chain(bytes.substr(0, bytes.size() - 3)));
    CHECK_THROWS(decode_chain(bytes + "x"));
    std::string bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS(decode_chain(bad));
  }

  TEST_CASE("atomic file writes") {
    const auto dir = std::filesystem::temp_directory_path() / "bnprdd_io_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const auto path = dir / "chain.bin";
    write_chain_file(path, sample_draws(), 2);
    CHECK(read_chain_file(path).size() == 7);
    CHECK_FALSE(std::filesystem::exists(dir / "chain.bin.tmp"));
    write_file_atomic(dir / "a.txt", "hello");
    CHECK(read_file(dir / "a.txt") == "hello");
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("shortest round-trip formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  }
}
