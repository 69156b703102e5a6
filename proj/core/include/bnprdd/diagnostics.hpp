#pragma once

// Fit and convergence diagnostics.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnprdd/predictive.hpp"
#include "bnprdd/sampler.hpp"

namespace bnprdd {

constexpr double kOutlierThreshold = 2.0;

struct FitReport {
  std::vector<double> predictive_mean;
  std::vector<double> predictive_variance;
  std::vector<double> z;          // NaN where the predictive variance is degenerate
  std::vector<bool> outlier;      // |z| > 2
  std::vector<bool> degenerate;   // V_n <= 0
  std::size_t outlier_count = 0;
  std::size_t degenerate_count = 0;
  std::optional<double> r_squared;  // empty when y is constant
};

/// Standardized residuals (y - E_n) / sqrt(V_n) from precomputed moments.
FitReport residuals_from_moments(std::span<const double> y, std::span<const double> mean,
                                 std::span<const double> variance);

/// Residuals of every observation under the predictive at its own (r, x).
FitReport residuals(const PosteriorDraws& draws, const RegressionData& data);

/// 1 - sum (y - yhat)^2 / sum (y - ybar)^2. Empty for constant y.
std::optional<double> r_squared(std::span<const double> y, std::span<const double> fitted);
std::optional<double> r_squared(const PosteriorDraws& draws, const RegressionData& data);

struct BatchMeans {
  double mean = 0.0;
  double half_width = 0.0;
};

constexpr std::size_t kDefaultBatches = 40;

/// Splits the series into equal batches (a leading remainder is dropped)
/// and reports 2 sd(batch means) / sqrt(batches).
BatchMeans batch_means_ci(std::span<const double> trace, std::size_t batches = kDefaultBatches);

struct Trace {
  std::string name;
  std::vector<double> values;
};

/// beta0..2, lambda0..2, mu_mu, sigma_mu, b_sigma and the occupied count,
/// one value per draw.
std::vector<Trace> parameter_traces(const PosteriorDraws& draws);

struct ConvergenceEntry {
  std::string name;
  BatchMeans ci;
  bool within_target = false;
};

struct ConvergenceReport {
  double target_half_width = 0.01;
  std::size_t batches = kDefaultBatches;
  std::vector<ConvergenceEntry> entries;

  bool all_within_target() const;
};

ConvergenceReport convergence_report(std::span<const Trace> traces, double target_half_width = 0.01,
                                     std::size_t batches = kDefaultBatches);

}  // namespace bnprdd
