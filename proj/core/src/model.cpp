#include "bnprdd/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bnprdd/dist.hpp"
#include "bnprdd/error.hpp"
#include "bnprdd/log.hpp"

namespace bnprdd {

namespace {

constexpr double kExponentClamp = 700.0;
constexpr long kMaxWindowWidth = 1'000'000;

// Lower and upper tail mass left outside [lo, hi].
double tail_below(int lo, double eta, double sigma) {
  return normal_cdf((static_cast<double>(lo) - 1.0 - eta) / sigma);
}
double tail_above(int hi, double eta, double sigma) {
  return normal_ccdf((static_cast<double>(hi) - eta) / sigma);
}

int to_index(double x) {
  if (!std::isfinite(x) || std::fabs(x) > static_cast<double>(kMaxWindowWidth)) {
    throw NumericalError("active_window: component index " + std::to_string(x) +
                         " out of representable range");
  }
  return static_cast<int>(x);
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

void Dataset::validate() const {
  const std::size_t n = y.size();
  if (r.size() != n || t.size() != n) throw DataError("dataset: column lengths differ");
  if (n < 2) throw DataError("dataset: need at least 2 records, got " + std::to_string(n));
  if (!std::isfinite(cutoff)) throw DataError("dataset: cutoff must be finite");
  std::size_t above = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i])) throw DataError("dataset: non-finite y at record " + std::to_string(i + 1));
    if (!std::isfinite(r[i])) throw DataError("dataset: non-finite r at record " + std::to_string(i + 1));
    if (t[i] != 0 && t[i] != 1) {
      throw DataError("dataset: t must be 0 or 1 at record " + std::to_string(i + 1));
    }
    above += static_cast<std::size_t>(assignment(i));
  }
  if (above == 0 || above == n) {
    throw DataError("dataset: empty stratum, all records lie on one side of the cutoff " +
                    format_double(cutoff));
  }
}

void Hyperparams::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DomainError(std::string("hyperparameter ") + name + " must be positive and finite");
    }
  };
  if (!std::isfinite(mu0)) throw DomainError("hyperparameter mu0 must be finite");
  positive(sigma0_sq, "sigma0_sq");
  positive(a0, "a0");
  positive(b0, "b0");
  positive(v, "v");
  positive(b_sigma_mu, "b_sigma_mu");
}

ComponentWindow::ComponentWindow(int j_min, std::vector<Component> components)
    : j_min_(j_min), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (!(c.variance > 0.0)) throw DomainError("component variance must be positive");
  }
}

void ParameterState::validate(const Hyperparams& hp) const {
  const auto& w = params.window;
  if (w.empty()) throw DomainError("state: empty component window");
  if (z.size() != alloc.size()) throw DomainError("state: latent and allocation sizes differ");
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!w.contains(alloc[i])) {
      throw DomainError("state: allocation " + std::to_string(alloc[i]) + " outside window [" +
                        std::to_string(w.j_min()) + ", " + std::to_string(w.j_max()) + "]");
    }
    if (!(z[i] > alloc[i] - 1.0 && z[i] <= alloc[i])) {
      throw DomainError("state: z_" + std::to_string(i) + " = " + format_double(z[i]) +
                        " not in (j-1, j] for j = " + std::to_string(alloc[i]));
    }
  }
  if (!(params.sigma_mu > 0.0 && params.sigma_mu < hp.b_sigma_mu)) {
    throw DomainError("state: sigma_mu outside (0, b_sigma_mu)");
  }
  for (const auto& c : w.components()) {
    if (!(c.variance > 0.0)) throw DomainError("state: nonpositive component variance");
  }
}

FunctionalH FunctionalH::quantile_at(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile functional needs u in (0,1)");
  return {Kind::QuantileAt, u};
}

FunctionalH FunctionalH::parse(const std::string& text) {
  const auto eq = text.find('=');
  const std::string name = text.substr(0, eq);
  double arg = 0.0;
  const bool has_arg = eq != std::string::npos;
  if (has_arg) {
    const std::string value = text.substr(eq + 1);
    std::size_t used = 0;
    try {
      arg = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(arg)) {
      throw DomainError("functional '" + text + "': bad numeric argument");
    }
  }
  auto no_arg = [&](FunctionalH h) {
    if (has_arg) throw DomainError("functional '" + name + "' takes no argument");
    return h;
  };
  auto need_arg = [&]() {
    if (!has_arg) throw DomainError("functional '" + name + "' needs '=value'");
  };
  if (name == "mean") return no_arg(mean());
  if (name == "variance") return no_arg(variance());
  if (name == "density") return density_at(arg);
  if (name == "cdf") return need_arg(), cdf_at(arg);
  if (name == "survival") return need_arg(), survival_at(arg);
  if (name == "indicator") return need_arg(), indicator_leq(arg);
  if (name == "quantile") return need_arg(), quantile_at(arg);
  throw DomainError("unknown functional '" + text + "'");
}

std::string FunctionalH::label() const {
  switch (kind) {
    case Kind::Mean: return "mean";
    case Kind::Variance: return "variance";
    case Kind::CdfAt: return "cdf=" + format_double(arg);
    case Kind::DensityAt: return "density=" + format_double(arg);
    case Kind::SurvivalAt: return "survival=" + format_double(arg);
    case Kind::QuantileAt: return "quantile=" + format_double(arg);
    case Kind::IndicatorLeq: return "indicator=" + format_double(arg);
  }
  return "unknown";
}

double eta(const Coefficients& beta, double r, int t) {
  return beta[0] + beta[1] * r + beta[2] * static_cast<double>(t);
}

double sigma_link(const Coefficients& lambda, double r, int t) {
  double e = lambda[0] + lambda[1] * r + lambda[2] * static_cast<double>(t);
  if (std::isnan(e)) throw NumericalError("sigma_link: NaN exponent");
  if (e > kExponentClamp || e < -kExponentClamp) {
    warn_once("sigma_link.clamp", "sigma_link: exponent " + format_double(e) + " clamped to +/-700");
    e = std::clamp(e, -kExponentClamp, kExponentClamp);
  }
  return std::exp(0.5 * e);
}

double weight(int j, double eta_value, double sigma) {
  const double hi = (static_cast<double>(j) - eta_value) / sigma;
  const double lo = (static_cast<double>(j) - 1.0 - eta_value) / sigma;
  if (lo > 0.0) return std::max(0.0, normal_ccdf(lo) - normal_ccdf(hi));
  if (hi < 0.0) return std::max(0.0, normal_cdf(hi) - normal_cdf(lo));
  return std::max(0.0, 1.0 - normal_cdf(lo) - normal_ccdf(hi));
}

double window_mass(int lo, int hi, double eta_value, double sigma) {
  if (hi < lo) return 0.0;
  return 1.0 - tail_below(lo, eta_value, sigma) - tail_above(hi, eta_value, sigma);
}

WindowBounds active_window(double eta_value, double sigma, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("active_window: eps must lie in (0,1)");
  if (!std::isfinite(eta_value) || !(sigma > 0.0) || !std::isfinite(sigma)) {
    throw NumericalError("active_window: non-finite link value (eta=" + format_double(eta_value) +
                         ", sigma=" + format_double(sigma) + ")");
  }
  const double q = -normal_quantile(0.5 * eps);
  int hi = to_index(std::ceil(eta_value + sigma * q));
  int lo = to_index(std::floor(eta_value - sigma * q)) + 1;
  if (lo > hi) lo = hi;
  auto excess = [&](int l, int h) {
    return tail_below(l, eta_value, sigma) + tail_above(h, eta_value, sigma) > eps;
  };
  while (excess(lo, hi)) {
    if (tail_below(lo, eta_value, sigma) >= tail_above(hi, eta_value, sigma)) {
      --lo;
    } else {
      ++hi;
    }
    if (static_cast<long>(hi) - lo > kMaxWindowWidth) {
      throw NumericalError("active_window: window wider than " + std::to_string(kMaxWindowWidth));
    }
  }
  // The split of eps between the tails is not necessarily optimal; trim.
  for (bool trimmed = true; trimmed && lo < hi;) {
    trimmed = false;
    const bool can_drop_lo = !excess(lo + 1, hi);
    const bool can_drop_hi = !excess(lo, hi - 1);
    if (can_drop_lo && (!can_drop_hi || weight(lo, eta_value, sigma) <= weight(hi, eta_value, sigma))) {
      ++lo;
      trimmed = true;
    } else if (can_drop_hi) {
      --hi;
      trimmed = true;
    }
  }
  return {lo, hi};
}

WindowBounds active_window(std::span<const double> etas, std::span<const double> sigmas, double eps) {
  if (etas.empty() || etas.size() != sigmas.size()) {
    throw DomainError("active_window: need equal-length nonempty eta and sigma lists");
  }
  WindowBounds hull = active_window(etas[0], sigmas[0], eps);
  for (std::size_t i = 1; i < etas.size(); ++i) {
    const WindowBounds b = active_window(etas[i], sigmas[i], eps);
    hull.j_min = std::min(hull.j_min, b.j_min);
    hull.j_max = std::max(hull.j_max, b.j_max);
  }
  if (static_cast<long>(hull.j_max) - hull.j_min > kMaxWindowWidth) {
    throw NumericalError("active_window: window wider than " + std::to_string(kMaxWindowWidth));
  }
  return hull;
}

Mixture::Mixture(std::vector<double> weights, std::vector<double> means, std::vector<double> sds)
    : weights_(std::move(weights)), means_(std::move(means)), sds_(std::move(sds)) {
  if (weights_.size() != means_.size() || weights_.size() != sds_.size()) {
    throw DomainError("mixture: weight, mean and sd lists differ in length");
  }
}

double Mixture::mass() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

double Mixture::density(double y) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    s += weights_[k] * normal_pdf((y - means_[k]) / sds_[k]) / sds_[k];
  }
  return s;
}

double Mixture::cdf(double y) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    s += weights_[k] * normal_cdf((y - means_[k]) / sds_[k]);
  }
  return std::min(s, 1.0);
}

double Mixture::survival(double y) const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    s += weights_[k] * normal_ccdf((y - means_[k]) / sds_[k]);
  }
  return std::min(s, 1.0);
}

double Mixture::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * means_[k];
  return s;
}

double Mixture::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double d = means_[k] - m;
    s += weights_[k] * (sds_[k] * sds_[k] + d * d);
  }
  return s;
}

double Mixture::prob_positive() const {
  double s = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) s += weights_[k] * normal_cdf(means_[k] / sds_[k]);
  return std::min(s, 1.0);
}

std::pair<double, double> Mixture::support_bracket() const {
  if (weights_.empty()) throw NumericalError("mixture: no components");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    lo = std::min(lo, means_[k] - 10.0 * sds_[k]);
    hi = std::max(hi, means_[k] + 10.0 * sds_[k]);
  }
  return {lo, hi};
}

double Mixture::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("mixture quantile: u must lie in (0,1)");
  auto [lo, hi] = support_bracket();
  double width = std::max(hi - lo, 1.0);
  while (cdf(lo) > u) {
    lo -= width;
    width *= 2.0;
    if (!std::isfinite(lo)) throw NumericalError("mixture quantile: lower bracket overflow");
  }
  width = std::max(hi - lo, 1.0);
  while (cdf(hi) < u) {
    hi += width;
    width *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("mixture quantile: upper bracket overflow");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (cdf(mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Mixture mixture_at(const Parameters& params, double r, int t) {
  const auto& w = params.window;
  if (w.empty()) throw DomainError("mixture_at: empty component window");
  const double e = eta(params.beta, r, t);
  const double s = sigma_link(params.lambda, r, t);
  // Weights vanish in double precision beyond ~40 sd of eta.
  int lo = w.j_min();
  int hi = w.j_max();
  const double reach = 40.0 * s + 1.0;
  if (std::isfinite(reach) && reach < 1e8) {
    lo = static_cast<int>(std::clamp(std::floor(e - reach), double(w.j_min()), double(w.j_max())));
    hi = static_cast<int>(std::clamp(std::ceil(e + reach), double(w.j_min()), double(w.j_max())));
  }
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> sds;
  for (int j = lo; j <= hi; ++j) {
    const double wj = weight(j, e, s);
    if (wj <= 0.0) continue;
    const Component& c = w.at(j);
    weights.push_back(wj);
    means.push_back(c.mean);
    sds.push_back(std::sqrt(c.variance));
  }
  Mixture m(std::move(weights), std::move(means), std::move(sds));
  if (m.mass() < 1.0 - 1e-6) {
    throw DomainError("mixture_at: query (r=" + format_double(r) + ", t=" + std::to_string(t) +
                      ") lies outside the fitted component window (mass " + format_double(m.mass()) + ")");
  }
  return m;
}

double mixture_density(double y, double r, int t, const Parameters& params) {
  return mixture_at(params, r, t).density(y);
}

double mixture_cdf(double y, double r, int t, const Parameters& params) {
  return mixture_at(params, r, t).cdf(y);
}

double mixture_mean(double r, int t, const Parameters& params) { return mixture_at(params, r, t).mean(); }

double mixture_variance(double r, int t, const Parameters& params) {
  return mixture_at(params, r, t).variance();
}

double mixture_quantile(double u, double r, int t, const Parameters& params) {
  return mixture_at(params, r, t).quantile(u);
}

double functional_eval(const FunctionalH& h, const Mixture& m) {
  switch (h.kind) {
    case FunctionalH::Kind::Mean: return m.mean();
    case FunctionalH::Kind::Variance: return m.variance();
    case FunctionalH::Kind::CdfAt: return m.cdf(h.arg);
    case FunctionalH::Kind::DensityAt: return m.density(h.arg);
    case FunctionalH::Kind::SurvivalAt: return m.survival(h.arg);
    case FunctionalH::Kind::QuantileAt: return m.quantile(h.arg);
    case FunctionalH::Kind::IndicatorLeq: return m.cdf(h.arg);
  }
  throw DomainError("functional_eval: unknown functional");
}

double functional_eval(const FunctionalH& h, double r, int t, const Parameters& params) {
  return functional_eval(h, mixture_at(params, r, t));
}

std::size_t occupied_components(const ComponentWindow& window, std::span<const int> alloc) {
  std::vector<char> seen(window.size(), 0);
  std::size_t count = 0;
  for (int j : alloc) {
    if (!window.contains(j)) continue;
    auto& s = seen[static_cast<std::size_t>(j - window.j_min())];
    if (!s) {
      s = 1;
      ++count;
    }
  }
  return count;
}

}  // namespace bnprdd
