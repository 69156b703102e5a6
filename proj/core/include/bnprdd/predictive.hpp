#pragma once

// Rao-Blackwellized posterior predictive functionals. Every quantity is
// an average over draws of an exact per-draw mixture functional; no
// outcomes are resampled.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bnprdd/model.hpp"
#include "bnprdd/sampler.hpp"

namespace bnprdd {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct PredictiveQuery {
  double r = 0.0;
  int t = 0;
  std::vector<double> grid;
  std::vector<double> quantiles;

  void validate() const;
};

/// 512 points spanning [min y - 3 sd(y), max y + 3 sd(y)].
std::vector<double> default_grid(std::span<const double> outcomes, std::size_t points = 512);

struct CredibleBand {
  std::vector<double> lower;  // 2.5th percentile of per-draw F(y)
  std::vector<double> upper;  // 97.5th percentile
};

struct PredictiveSummary {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<double> cdf;
  double mean = 0.0;
  double variance = 0.0;
  std::vector<std::pair<double, double>> quantiles;  // (u, y)
  std::optional<CredibleBand> cdf_band;              // present with >= 40 draws
};

/// Posterior mean and posterior variance across draws of a per-draw scalar.
struct PosteriorMoments {
  double mean = 0.0;
  double variance = 0.0;
};

constexpr std::size_t kMinDrawsForBand = 40;

/// Per-draw mixtures at fixed covariates, in draw order.
std::vector<Mixture> mixtures_at(const PosteriorDraws& draws, double r, int t);

/// E_n and V_n of H over the posterior: mean and variance across draws
/// of functional_eval(H, draw).
PosteriorMoments posterior_functional(const PosteriorDraws& draws, const FunctionalH& h, double r, int t);
std::vector<double> functional_trace(const PosteriorDraws& draws, const FunctionalH& h, double r, int t);

/// Predictive mean E_n(Y|r,t) and variance V_n(Y|r,t), the posterior
/// expectation of the squared deviation about E_n.
PosteriorMoments predictive_moments(const PosteriorDraws& draws, double r, int t);

/// Binary model: E_n(T|r,a) and the posterior variance of Pr(T=1|r,a;zeta).
PosteriorMoments treatment_probability(const PosteriorDraws& draws, double r, int a);

PredictiveSummary predict(const PosteriorDraws& draws, const PredictiveQuery& query);

/// F_n^{-1}(u | r, t) by bracketed bisection on the averaged CDF.
double predictive_quantile(const PosteriorDraws& draws, double r, int t, double u);
double predictive_quantile(std::span<const Mixture> mixtures, double u);

/// Averaged CDF over a set of per-draw mixtures.
double averaged_cdf(std::span<const Mixture> mixtures, double y);

/// Pointwise empirical 2.5/97.5 percentiles of per-draw F(y|r,t).
/// Throws InsufficientDrawsError below 40 draws.
CredibleBand cdf_credible_band(const PosteriorDraws& draws, double r, int t, std::span<const double> grid);

struct PpRow {
  double y = 0.0;
  double cdf_control = 0.0;
  double cdf_treated = 0.0;
  double control_lower = 0.0;
  double control_upper = 0.0;
  double treated_lower = 0.0;
  double treated_upper = 0.0;
  bool overlap = true;  // the two 95% intervals intersect
};

/// Paired CDFs at (r0, 0) and (r0, 1) with their credible bands.
std::vector<PpRow> pp_plot_data(const PosteriorDraws& draws, double r0, std::span<const double> grid);

/// Type-7 empirical percentile of an unsorted sample (copied).
double percentile(std::span<const double> values, double p);

}  // namespace bnprdd
