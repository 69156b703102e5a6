#pragma once

// Gibbs sampler for the infinite probit mixture, continuous and binary
// outcome variants.
//
// One sweep updates, in order: allocations j_i (latent z_i marginalized),
// z_i | j_i, occupied mu_j, occupied sigma_j^2, empty components from the
// prior, mu_mu, sigma_mu (slice), b_sigma, beta (Gaussian conjugacy) and
// each lambda coordinate (slice). The binary variant adds the latent
// outcome t*_i, drawn jointly with j_i.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bnprdd/dist.hpp"
#include "bnprdd/model.hpp"
#include "bnprdd/rng.hpp"

namespace bnprdd {

enum class ModelKind : std::uint32_t { Continuous = 0, Binary = 1 };

/// Which treatment-side covariate enters the links next to r.
enum class Covariate { Treatment, Assignment };

/// Regression view of a Dataset: the outcome column, r, and the 0/1
/// covariate that enters eta and sigma.
struct RegressionData {
  ModelKind kind = ModelKind::Continuous;
  std::vector<double> outcome;  // y, or t in {0,1} for the binary model
  std::vector<double> r;
  std::vector<int> indicator;
  double cutoff = 0.0;

  std::size_t size() const { return outcome.size(); }
  void validate() const;
};

/// Continuous outcome y on (r, t) (sharp) or (r, 1{r >= r0}) (fuzzy numerator).
RegressionData outcome_regression(const Dataset& data, Covariate covariate);

/// Binary treatment receipt t on (r, 1{r >= r0}) (fuzzy denominator).
RegressionData treatment_regression(const Dataset& data);

struct McmcConfig {
  std::size_t total_iterations = 200000;
  std::size_t burn_in = 2000;
  std::size_t thin = 5;
  std::uint64_t seed = 1;
  std::size_t chains = 1;

  void validate() const;
  /// floor((total - burn_in) / thin)
  std::size_t retained_per_chain() const;
};

/// One retained posterior draw of zeta with its link values at the
/// cutoff queries (r0, 0) and (r0, 1).
struct Draw {
  Parameters params;
  std::uint32_t chain = 0;
  std::uint32_t occupied = 0;
  std::array<double, 2> eta_at_cutoff{};
  std::array<double, 2> sigma_at_cutoff{};
};

struct PosteriorDraws {
  ModelKind kind = ModelKind::Continuous;
  double cutoff = 0.0;
  std::vector<Draw> draws;

  std::size_t size() const { return draws.size(); }
  bool empty() const { return draws.empty(); }
};

Draw make_draw(const ParameterState& state, double cutoff, std::uint32_t chain);

namespace conditionals {

/// mu_j | sigma_j^2, mu_mu, sigma_mu given n_j observations summing to `sum`.
NormalParams component_mean(std::size_t n, double sum, double variance, double mu_mu, double sigma_mu);

/// sigma_j^2 | mu_j: IG(1 + n/2, b_sigma + ss/2), ss = sum of squared
/// deviations about mu_j.
GammaParams component_variance(std::size_t n, double ss, double b_sigma);

NormalParams mu_mu(std::span<const Component> components, double sigma_mu, const Hyperparams& hp);

/// Ga(a0 + J, b0 + sum 1/sigma_j^2) over the J window components.
GammaParams b_sigma(std::span<const Component> components, const Hyperparams& hp);

struct Gaussian3 {
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;
  Eigen::Matrix3d root;  // upper triangular, root * root' = covariance
};

/// beta | z, lambda for z_i = (1, r_i, x_i) beta + e_i, e_i ~ N(0, sigma^2(r_i, x_i)),
/// prior N(0, v I).
Gaussian3 beta(std::span<const double> z, std::span<const double> r, std::span<const int> x,
               const Coefficients& lambda, double v);

/// Log full conditional of sigma_mu on (0, b_sigma_mu), up to a constant.
double sigma_mu_log_density(double sigma_mu, std::span<const Component> components, double mu_mu,
                            double b_sigma_mu);

/// Log full conditional of lambda[k], up to a constant.
double lambda_log_density(double value, int k, const Coefficients& lambda, std::span<const double> z,
                          std::span<const double> r, std::span<const int> x, const Coefficients& beta,
                          double v);

}  // namespace conditionals

/// Gibbs sampler bound to one data set and prior. Holds reusable
/// workspace; one instance per chain.
class GibbsSampler {
 public:
  GibbsSampler(RegressionData data, Hyperparams hp);

  const RegressionData& data() const { return data_; }
  const Hyperparams& hyperparams() const { return hp_; }

  ParameterState initial_state(RandomStream& rng);

  /// One full scan. Throws NumericalError (with a state dump) if any
  /// conditional turns non-finite.
  void sweep(ParameterState& state, RandomStream& rng);

  // Individual steps, exposed for testing. refresh_window() must precede
  // allocate() within a sweep.
  void refresh_links(const ParameterState& state);
  void refresh_window(ParameterState& state, RandomStream& rng);
  void allocate(ParameterState& state, RandomStream& rng);
  void draw_latents(ParameterState& state, RandomStream& rng);
  void update_components(ParameterState& state, RandomStream& rng);
  void update_hyper(ParameterState& state, RandomStream& rng);
  void update_beta(ParameterState& state, RandomStream& rng);
  void update_lambda(ParameterState& state, RandomStream& rng);
  /// Grow the window so it covers the links after the beta/lambda updates;
  /// new slots are drawn from the component prior.
  void cover_links(ParameterState& state, RandomStream& rng);

 private:
  Component prior_component(const Parameters& p, RandomStream& rng) const;
  std::span<const double> working_outcome(const ParameterState& state) const;
  void check_finite(const ParameterState& state, const char* step) const;

  RegressionData data_;
  Hyperparams hp_;
  std::vector<double> eta_;
  std::vector<double> sigma_;
  std::vector<double> log_prob_;
  std::vector<double> boundary_tail_;
  std::vector<double> counts_;
  std::vector<double> means_;
  std::vector<double> m2_;
};

/// Single sweeps as value transforms.
ParameterState gibbs_sweep(ParameterState state, const RegressionData& data, const Hyperparams& hp,
                           RandomStream& rng);
ParameterState binary_sweep(ParameterState state, const RegressionData& data, const Hyperparams& hp,
                            RandomStream& rng);

/// Run cfg.chains chains from seeds split off cfg.seed and pool the
/// retained draws in chain order. Deterministic for a fixed seed.
PosteriorDraws run_chain(const RegressionData& data, const Hyperparams& hp, const McmcConfig& cfg);

}  // namespace bnprdd
