#pragma once

// Synthetic regression-discontinuity data with known effects at the cutoff.
//
// Y = m0(r) + delta_mean T + exp(delta_logvar T / 2) e, where m0 is a
// polynomial in (r - r0) and e is drawn from the noise family. T follows
// assignment with probability adherence_above (r >= r0) or
// adherence_below (r < r0).

#include <cstddef>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "bnprdd/model.hpp"

namespace bnprdd {

struct UniformR {
  double a = -1.0;
  double b = 1.0;
};

struct NormalR {
  double mean = 0.0;
  double sd = 1.0;
};

struct NormalNoise {
  double sd = 1.0;
};

/// weight N(mean1, sd1^2) + (1 - weight) N(mean2, sd2^2)
struct MixtureNoise {
  double weight = 0.5;
  double mean1 = -1.0;
  double sd1 = 0.5;
  double mean2 = 1.0;
  double sd2 = 0.5;
};

struct SimSpec {
  std::size_t n = 500;
  double r0 = 0.0;
  std::variant<UniformR, NormalR> r_dist = UniformR{};
  std::vector<double> m0{0.0};  // coefficients of (r - r0)^k
  double delta_mean = 0.0;
  double delta_logvar = 0.0;
  std::variant<NormalNoise, MixtureNoise> noise = NormalNoise{};
  double adherence_above = 1.0;  // Pr(T = 1 | r >= r0)
  double adherence_below = 1.0;  // Pr(T = 0 | r < r0)
  std::uint64_t seed = 1;

  void validate() const;
};

/// Effects at r0 of the structural outcome law, plus the compliance jump.
struct GroundTruth {
  SimSpec spec;
  double mean_effect = 0.0;
  double variance_effect = 0.0;
  double compliance_jump = 1.0;
  std::vector<std::pair<double, double>> quantile_effects;  // (u, effect)

  /// Law of Y given (r0, t).
  double outcome_mean(int t) const;
  double outcome_variance(int t) const;
  double outcome_cdf(double y, int t) const;
  double outcome_quantile(double u, int t) const;
  double quantile_effect(double u) const;
};

struct Simulation {
  Dataset data;
  GroundTruth truth;
};

/// Levels reported in GroundTruth::quantile_effects.
std::vector<double> default_quantile_levels();

Simulation simulate(const SimSpec& spec);
GroundTruth ground_truth(const SimSpec& spec);

}  // namespace bnprdd
