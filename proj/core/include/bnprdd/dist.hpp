#pragma once

// Scalar probability kernels for the normal, truncated normal, gamma,
// inverse-gamma and uniform families. Samplers take the random stream
// explicitly and carry no hidden state, so a chain replays exactly from
// its seed.

#include <limits>

#include "bnprdd/rng.hpp"

namespace bnprdd {

struct NormalParams {
  double mean = 0.0;
  double variance = 1.0;  // squared units of the variate

  double sd() const;
  void validate() const;
};

/// Shape/rate parameterization: Ga(x|a,b) ∝ x^(a-1) exp(-b x),
/// IG(x|a,b) ∝ x^(-a-1) exp(-b/x).
struct GammaParams {
  double shape = 1.0;
  double rate = 1.0;

  void validate() const;
};

struct TruncatedNormalParams {
  NormalParams base;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  void validate() const;
};

// -- normal ---------------------------------------------------------------

double normal_pdf(double x);
double normal_pdf(double x, const NormalParams& p);
double normal_log_pdf(double x, const NormalParams& p);

/// Φ(x), evaluated through erfc so both tails keep full relative precision.
double normal_cdf(double x);

/// 1 - Φ(x) without cancellation.
double normal_ccdf(double x);

/// Φ⁻¹(u) for u in (0,1). Throws DomainError otherwise.
double normal_quantile(double u);

double sample_normal(RandomStream& rng);
double sample_normal(const NormalParams& p, RandomStream& rng);

// -- truncated normal -----------------------------------------------------

/// Draw from the base normal restricted to (lower, upper]. Inverse-CDF in
/// the body; exponential/uniform rejection when the interval sits more
/// than six standard deviations from the mean.
double sample_truncated_normal(const TruncatedNormalParams& p, RandomStream& rng);

/// Analytic CDF of the truncated law (test and diagnostics helper).
double truncated_normal_cdf(double x, const TruncatedNormalParams& p);

// -- gamma / inverse gamma ------------------------------------------------

double gamma_pdf(double x, const GammaParams& p);
double gamma_log_pdf(double x, const GammaParams& p);
double inverse_gamma_pdf(double x, const GammaParams& p);
double inverse_gamma_log_pdf(double x, const GammaParams& p);

double gamma_mean(const GammaParams& p);
/// b/(a-1); +inf when a <= 1.
double inverse_gamma_mean(const GammaParams& p);

/// Marsaglia-Tsang squeeze; shape < 1 boosted through U^(1/a).
double sample_gamma(const GammaParams& p, RandomStream& rng);
double sample_inverse_gamma(const GammaParams& p, RandomStream& rng);

// -- uniform --------------------------------------------------------------

double sample_uniform(double lower, double upper, RandomStream& rng);

}  // namespace bnprdd
