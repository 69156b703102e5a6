#pragma once

// Data and parameter types for the infinite probit mixture, plus pure
// evaluation of its weights, link functions and mixture functionals.
//
// The outcome law at covariates (r, t) is
//
//   f(y | r, t) = sum_j n(y | mu_j, sigma_j^2) w_j(eta(r,t), sigma(r,t)),
//   w_j(eta, s) = Phi((j - eta)/s) - Phi((j - 1 - eta)/s),
//   eta = b0 + b1 r + b2 t,   sigma^2 = exp(l0 + l1 r + l2 t),
//
// with j ranging over the integers. Only a finite window of j carries
// non-negligible weight; see active_window().

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bnprdd {

/// Observations (y_i, r_i, t_i) and the cutoff r0. The assignment
/// indicator a_i = 1{r_i >= r0} is derived.
struct Dataset {
  std::vector<double> y;
  std::vector<double> r;
  std::vector<int> t;
  double cutoff = 0.0;

  std::size_t size() const { return y.size(); }
  int assignment(std::size_t i) const { return r[i] >= cutoff ? 1 : 0; }

  /// Throws DataError: n >= 2, equal column lengths, finite y and r,
  /// t in {0,1}, both sides of the cutoff populated.
  void validate() const;
};

/// Prior constants. The improper limits (sigma0^2 -> inf,
/// a0, b0 -> 0) are realized by proper but vague surrogates.
struct Hyperparams {
  double mu0 = 0.0;
  double sigma0_sq = 1e10;
  double a0 = 1e-3;
  double b0 = 1e-3;
  double v = 1e5;
  double b_sigma_mu = 5.0;

  void validate() const;
};

using Coefficients = std::array<double, 3>;

struct Component {
  double mean = 0.0;
  double variance = 1.0;
};

/// Contiguous block of mixture components j_min..j_max.
class ComponentWindow {
 public:
  ComponentWindow() = default;
  ComponentWindow(int j_min, std::vector<Component> components);

  int j_min() const { return j_min_; }
  int j_max() const { return j_min_ + static_cast<int>(components_.size()) - 1; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  bool contains(int j) const { return !empty() && j >= j_min() && j <= j_max(); }

  Component& at(int j) { return components_[static_cast<std::size_t>(j - j_min_)]; }
  const Component& at(int j) const { return components_[static_cast<std::size_t>(j - j_min_)]; }

  std::span<Component> components() { return components_; }
  std::span<const Component> components() const { return components_; }

  /// Re-window to [lo, hi]. Components in the overlap keep their values;
  /// new slots are filled by fill(j).
  template <typename Fill>
  void rewindow(int lo, int hi, Fill&& fill) {
    std::vector<Component> next;
    next.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (int j = lo; j <= hi; ++j) next.push_back(contains(j) ? at(j) : fill(j));
    j_min_ = lo;
    components_ = std::move(next);
  }

 private:
  int j_min_ = 0;
  std::vector<Component> components_;
};

/// The model parameter zeta: window components plus shared and link
/// parameters. sigma_mu is the prior standard deviation of mu_j.
struct Parameters {
  ComponentWindow window;
  double mu_mu = 0.0;
  double sigma_mu = 1.0;
  double b_sigma = 1.0;
  Coefficients beta{0.0, 0.0, 0.0};
  Coefficients lambda{0.0, 0.0, 0.0};
};

/// zeta together with the sampler's latent variables: z_i with
/// ceil(z_i) = alloc_i, and for the binary model the latent outcome t*_i.
struct ParameterState {
  Parameters params;
  std::vector<double> z;
  std::vector<int> alloc;
  std::vector<double> latent_outcome;

  /// Throws DomainError if latents and window disagree or sigma_mu leaves
  /// (0, b_sigma_mu).
  void validate(const Hyperparams& hp) const;
};

/// Distributional functional H evaluated per parameter draw.
struct FunctionalH {
  enum class Kind { Mean, Variance, CdfAt, DensityAt, SurvivalAt, QuantileAt, IndicatorLeq };

  Kind kind = Kind::Mean;
  double arg = 0.0;  // y for the pointwise kinds, u for QuantileAt

  static FunctionalH mean() { return {Kind::Mean, 0.0}; }
  static FunctionalH variance() { return {Kind::Variance, 0.0}; }
  static FunctionalH cdf_at(double y) { return {Kind::CdfAt, y}; }
  static FunctionalH density_at(double y) { return {Kind::DensityAt, y}; }
  static FunctionalH survival_at(double y) { return {Kind::SurvivalAt, y}; }
  static FunctionalH quantile_at(double u);
  static FunctionalH indicator_leq(double y) { return {Kind::IndicatorLeq, y}; }

  /// "mean", "variance", "quantile=0.25", "cdf=0.3", "density=1",
  /// "survival=0", "indicator=0". Bare "density" means density at y = 0.
  static FunctionalH parse(const std::string& text);
  std::string label() const;
};

// -- link functions -------------------------------------------------------

double eta(const Coefficients& beta, double r, int t);

/// sigma(r,t) = exp((l0 + l1 r + l2 t)/2). The exponent is clamped to
/// [-700, 700] with a warning.
double sigma_link(const Coefficients& lambda, double r, int t);

/// Weight of component j: Phi((j-eta)/sigma) - Phi((j-1-eta)/sigma),
/// computed on the tail side that avoids cancellation.
double weight(int j, double eta, double sigma);

/// Probability mass of components lo..hi at (eta, sigma).
double window_mass(int lo, int hi, double eta, double sigma);

struct WindowBounds {
  int j_min = 0;
  int j_max = 0;
};

constexpr double kDefaultWindowEps = 1e-12;

/// Smallest index range that holds mass >= 1 - eps at every (eta, sigma)
/// pair, taken as the hull of the per-pair minimal ranges.
WindowBounds active_window(std::span<const double> etas, std::span<const double> sigmas,
                           double eps = kDefaultWindowEps);

/// Minimal range for one pair; used per observation in the allocation step.
WindowBounds active_window(double eta, double sigma, double eps);

// -- mixture at fixed covariates ----------------------------------------

/// Finite normal mixture obtained by fixing (r, t). Zero-weight
/// components are dropped.
class Mixture {
 public:
  Mixture() = default;
  Mixture(std::vector<double> weights, std::vector<double> means, std::vector<double> sds);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> means() const { return means_; }
  std::span<const double> sds() const { return sds_; }

  /// Sum of retained weights (>= 1 - window eps for a covered query).
  double mass() const;

  double density(double y) const;
  double cdf(double y) const;
  double survival(double y) const;
  double mean() const;
  double variance() const;
  /// Pr(latent outcome > 0): the binary-model probability Pr(T = 1).
  double prob_positive() const;
  /// Bracketed bisection on cdf; throws NumericalError if the bracket
  /// cannot be expanded without overflow.
  double quantile(double u) const;

  /// Initial bisection bracket covering essentially all mass.
  std::pair<double, double> support_bracket() const;

 private:
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> sds_;
};

/// Throws DomainError when the window covers less than 1 - 1e-6 of the
/// mass at (r, t): the query lies outside the region the draw was fitted on.
Mixture mixture_at(const Parameters& params, double r, int t);

double mixture_density(double y, double r, int t, const Parameters& params);
double mixture_cdf(double y, double r, int t, const Parameters& params);
double mixture_mean(double r, int t, const Parameters& params);
double mixture_variance(double r, int t, const Parameters& params);
double mixture_quantile(double u, double r, int t, const Parameters& params);

double functional_eval(const FunctionalH& h, const Mixture& mixture);
double functional_eval(const FunctionalH& h, double r, int t, const Parameters& params);

/// Number of window components with at least one allocated observation.
std::size_t occupied_components(const ComponentWindow& window, std::span<const int> alloc);

}  // namespace bnprdd
