#pragma once

// Dataset CSV, the binary chain file, and atomic file writes.
//
// Chain file, all little-endian:
//   header  char[8] "BNPRDDC1", u32 version (1), u32 model kind,
//           u64 draw count, f64 cutoff, u32 chain count, u32 reserved (0)
//   record  u32 chain, i32 j_min, i32 j_max, u32 occupied,
//           f64 beta[3], f64 lambda[3], f64 mu_mu, f64 sigma_mu, f64 b_sigma,
//           then (j_max - j_min + 1) x (f64 mean, f64 variance)

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "bnprdd/model.hpp"
#include "bnprdd/sampler.hpp"

namespace bnprdd {

struct ColumnMapping {
  std::string y = "y";
  std::string r = "r";
  std::optional<std::string> t = "t";  // absent: t = 1{r >= cutoff}
};

/// Header row, comma separated, '.' decimal point. Errors name the line.
Dataset parse_dataset_csv(std::istream& in, const ColumnMapping& mapping, double cutoff);
Dataset read_dataset_csv(const std::filesystem::path& path, const ColumnMapping& mapping, double cutoff);

/// Columns y,r,t.
std::string dataset_csv(const Dataset& data);

/// Shortest decimal text that round-trips.
std::string format_double(double x);

constexpr std::uint32_t kChainFileVersion = 1;

std::string encode_chain(const PosteriorDraws& draws, std::uint32_t n_chains);
PosteriorDraws decode_chain(std::string_view bytes, std::uint32_t* n_chains = nullptr);

void write_chain_file(const std::filesystem::path& path, const PosteriorDraws& draws, std::uint32_t n_chains);
PosteriorDraws read_chain_file(const std::filesystem::path& path, std::uint32_t* n_chains = nullptr);

/// Write to a sibling temporary file and rename over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

}  // namespace bnprdd
