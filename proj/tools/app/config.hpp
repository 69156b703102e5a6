#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bnprdd/datasim.hpp"
#include "bnprdd/model.hpp"
#include "bnprdd/sampler.hpp"

namespace bnprdd::cli {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

/// Affine maps between the data scale and the scale the model is fitted on.
struct Transform {
  double y_mean = 0.0;
  double y_sd = 1.0;
  double r_shift = 0.0;

  double y_to_model(double y) const { return (y - y_mean) / y_sd; }
  double y_from_model(double y) const { return y_mean + y_sd * y; }
  double r_to_model(double r) const { return r - r_shift; }
};

struct Query {
  double r = 0.0;
  int t = 0;
};

struct RunConfig {
  std::string command;
  std::filesystem::path data;
  std::string y_col = "y";
  std::string r_col = "r";
  std::optional<std::string> t_col = "t";
  double cutoff = 0.0;
  bool standardize_y = true;
  bool center_r = true;
  Hyperparams hyper;
  McmcConfig mcmc;
  std::string design = "sharp";
  std::vector<std::string> functionals{"mean"};
  std::vector<double> quantiles{0.05, 0.25, 0.5, 0.75, 0.95};
  std::vector<Query> queries;  // empty: (cutoff, 0) and (cutoff, 1)
  std::size_t grid_points = 512;
  std::optional<std::vector<double>> sensitivity;
  bool second_order = false;
  bool posterior_ratio = false;
  std::filesystem::path out = "bnprdd-out";
  SimSpec sim;

  void validate() const;
};

json to_json(const RunConfig& c);
RunConfig config_from_json(const json& j);

/// The manifest written next to every run's artifacts.
json manifest(const RunConfig& c);

/// Parses "1,.9,.8" style lists.
std::vector<double> parse_list(const std::string& text);

}  // namespace bnprdd::cli
