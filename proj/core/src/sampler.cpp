#include "bnprdd/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "bnprdd/error.hpp"
#include "bnprdd/slice.hpp"

namespace bnprdd {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398614;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Normal CDF weights beyond this many link sd are exactly zero in double.
constexpr double kWeightReach = 38.5;

double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic series of the Mills ratio.
  const double x2 = x * x;
  return -0.5 * x2 - kLogSqrt2Pi - std::log(-x) + std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

// Tail probability stored per boundary: Phi(x) when x <= 0, else 1 - Phi(x).
double boundary_tail(double x) { return x <= 0.0 ? normal_cdf(x) : normal_ccdf(x); }

double interval_weight(double a, double tail_a, double b, double tail_b) {
  if (b <= 0.0) return tail_b - tail_a;
  if (a > 0.0) return tail_a - tail_b;
  return 1.0 - tail_a - tail_b;
}

std::string dump_state(const ParameterState& s) {
  std::ostringstream os;
  os.precision(10);
  const auto& p = s.params;
  os << "beta=(" << p.beta[0] << ", " << p.beta[1] << ", " << p.beta[2] << ") lambda=(" << p.lambda[0]
     << ", " << p.lambda[1] << ", " << p.lambda[2] << ") mu_mu=" << p.mu_mu << " sigma_mu=" << p.sigma_mu
     << " b_sigma=" << p.b_sigma << " window=[" << p.window.j_min() << ", " << p.window.j_max() << "]";
  return os.str();
}

double sample_mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  const double m = sample_mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return x.size() > 1 ? s / static_cast<double>(x.size() - 1) : 0.0;
}

}  // namespace

void RegressionData::validate() const {
  const std::size_t n = outcome.size();
  if (r.size() != n || indicator.size() != n) throw DataError("regression data: column lengths differ");
  if (n < 2) throw DataError("regression data: need at least 2 records");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(outcome[i]) || !std::isfinite(r[i])) {
      throw DataError("regression data: non-finite value at record " + std::to_string(i + 1));
    }
    if (indicator[i] != 0 && indicator[i] != 1) {
      throw DataError("regression data: covariate indicator must be 0/1 at record " + std::to_string(i + 1));
    }
    if (kind == ModelKind::Binary && outcome[i] != 0.0 && outcome[i] != 1.0) {
      throw DataError("regression data: binary outcome must be 0/1 at record " + std::to_string(i + 1));
    }
  }
}

RegressionData outcome_regression(const Dataset& data, Covariate covariate) {
  data.validate();
  RegressionData out;
  out.kind = ModelKind::Continuous;
  out.outcome = data.y;
  out.r = data.r;
  out.cutoff = data.cutoff;
  out.indicator.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.indicator[i] = covariate == Covariate::Treatment ? data.t[i] : data.assignment(i);
  }
  return out;
}

RegressionData treatment_regression(const Dataset& data) {
  data.validate();
  RegressionData out;
  out.kind = ModelKind::Binary;
  out.r = data.r;
  out.cutoff = data.cutoff;
  out.outcome.resize(data.size());
  out.indicator.resize(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.outcome[i] = static_cast<double>(data.t[i]);
    out.indicator[i] = data.assignment(i);
  }
  return out;
}

void McmcConfig::validate() const {
  if (thin < 1) throw DomainError("mcmc: thin must be >= 1");
  if (burn_in >= total_iterations) throw DomainError("mcmc: burn_in must be < total_iterations");
  if (chains < 1) throw DomainError("mcmc: need at least one chain");
}

std::size_t McmcConfig::retained_per_chain() const { return (total_iterations - burn_in) / thin; }

Draw make_draw(const ParameterState& state, double cutoff, std::uint32_t chain) {
  Draw d;
  d.params = state.params;
  d.chain = chain;
  d.occupied = static_cast<std::uint32_t>(occupied_components(state.params.window, state.alloc));
  for (int t = 0; t < 2; ++t) {
    d.eta_at_cutoff[static_cast<std::size_t>(t)] = eta(state.params.beta, cutoff, t);
    d.sigma_at_cutoff[static_cast<std::size_t>(t)] = sigma_link(state.params.lambda, cutoff, t);
  }
  return d;
}

namespace conditionals {

NormalParams component_mean(std::size_t n, double sum, double variance, double mu_mu, double sigma_mu) {
  const double prior_prec = 1.0 / (sigma_mu * sigma_mu);
  const double prec = prior_prec + static_cast<double>(n) / variance;
  return {(mu_mu * prior_prec + sum / variance) / prec, 1.0 / prec};
}

GammaParams component_variance(std::size_t n, double ss, double b_sigma) {
  return {1.0 + 0.5 * static_cast<double>(n), b_sigma + 0.5 * ss};
}

NormalParams mu_mu(std::span<const Component> components, double sigma_mu, const Hyperparams& hp) {
  double sum = 0.0;
  for (const auto& c : components) sum += c.mean;
  const double like_prec = 1.0 / (sigma_mu * sigma_mu);
  const double prec = 1.0 / hp.sigma0_sq + static_cast<double>(components.size()) * like_prec;
  return {(hp.mu0 / hp.sigma0_sq + sum * like_prec) / prec, 1.0 / prec};
}

GammaParams b_sigma(std::span<const Component> components, const Hyperparams& hp) {
  double inv = 0.0;
  for (const auto& c : components) inv += 1.0 / c.variance;
  return {hp.a0 + static_cast<double>(components.size()), hp.b0 + inv};
}

Gaussian3 beta(std::span<const double> z, std::span<const double> r, std::span<const int> x,
               const Coefficients& lambda, double v) {
  // Householder QR of the whitened design [W^{1/2} X; I / sqrt(v)] instead of
  // a Cholesky factor of X'WX + I/v, whose condition number squares.
  const auto n = static_cast<Eigen::Index>(z.size());
  Eigen::MatrixX3d a(n + 3, 3);
  Eigen::VectorXd b(n + 3);
  std::vector<double> w(z.size());
  double scale = 1.0 / std::sqrt(v);
  for (std::size_t i = 0; i < z.size(); ++i) {
    w[i] = 1.0 / sigma_link(lambda, r[i], x[i]);
    scale = std::max(scale, w[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double wi = w[u] / scale;
    a.row(i) << wi, wi * r[u], wi * static_cast<double>(x[u]);
    b(i) = wi * z[u];
  }
  a.bottomRows<3>() = Eigen::Matrix3d::Identity() / (std::sqrt(v) * scale);
  b.tail<3>().setZero();
  const Eigen::HouseholderQR<Eigen::MatrixX3d> qr(a);
  const Eigen::Matrix3d rf = qr.matrixQR().topRows<3>().triangularView<Eigen::Upper>();
  for (int k = 0; k < 3; ++k) {
    if (!(std::isfinite(rf(k, k)) && rf(k, k) != 0.0)) {
      throw NumericalError("beta conditional: singular whitened design");
    }
  }
  const Eigen::VectorXd qtb = qr.householderQ().adjoint() * b;
  Gaussian3 g;
  g.mean = rf.triangularView<Eigen::Upper>().solve(qtb.head<3>());
  g.root = rf.triangularView<Eigen::Upper>().solve(Eigen::Matrix3d::Identity()) / scale;
  g.covariance = g.root * g.root.transpose();
  if (!g.mean.allFinite() || !g.root.allFinite()) throw NumericalError("beta conditional: non-finite moments");
  return g;
}

double sigma_mu_log_density(double sigma_mu, std::span<const Component> components, double mu_mu,
                            double b_sigma_mu) {
  if (!(sigma_mu > 0.0 && sigma_mu < b_sigma_mu)) return kNegInf;
  double ss = 0.0;
  for (const auto& c : components) ss += (c.mean - mu_mu) * (c.mean - mu_mu);
  return -static_cast<double>(components.size()) * std::log(sigma_mu) - 0.5 * ss / (sigma_mu * sigma_mu);
}

double lambda_log_density(double value, int k, const Coefficients& lambda, std::span<const double> z,
                          std::span<const double> r, std::span<const int> x, const Coefficients& beta,
                          double v) {
  Coefficients l = lambda;
  l[static_cast<std::size_t>(k)] = value;
  double s = -0.5 * value * value / v;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double xi = static_cast<double>(x[i]);
    const double lin = l[0] + l[1] * r[i] + l[2] * xi;
    const double e = z[i] - (beta[0] + beta[1] * r[i] + beta[2] * xi);
    s += -0.5 * lin - 0.5 * e * e * std::exp(-lin);
  }
  return std::isnan(s) ? kNegInf : s;
}

}  // namespace conditionals

GibbsSampler::GibbsSampler(RegressionData data, Hyperparams hp) : data_(std::move(data)), hp_(hp) {
  data_.validate();
  hp_.validate();
  eta_.resize(data_.size() + 2);
  sigma_.resize(data_.size() + 2);
}

std::span<const double> GibbsSampler::working_outcome(const ParameterState& state) const {
  if (data_.kind == ModelKind::Binary) return state.latent_outcome;
  return data_.outcome;
}

Component GibbsSampler::prior_component(const Parameters& p, RandomStream& rng) const {
  const double mean = sample_normal({p.mu_mu, p.sigma_mu * p.sigma_mu}, rng);
  const double variance = sample_inverse_gamma({1.0, p.b_sigma}, rng);
  return {mean, variance};
}

ParameterState GibbsSampler::initial_state(RandomStream& rng) {
  const std::size_t n = data_.size();
  ParameterState s;
  if (data_.kind == ModelKind::Binary) {
    s.latent_outcome.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.latent_outcome[i] = data_.outcome[i] > 0.5 ? 0.5 : -0.5;
  }
  const auto y = working_outcome(s);
  const double var = std::max(sample_variance(y), 1e-6);
  auto& p = s.params;
  p.mu_mu = sample_mean(y);
  p.sigma_mu = std::min(std::sqrt(var), 0.5 * hp_.b_sigma_mu);
  p.b_sigma = 0.5 * var;
  p.beta = {0.0, 0.0, 0.0};
  p.lambda = {0.0, 0.0, 0.0};

  refresh_links(s);
  const WindowBounds b = active_window(eta_, sigma_, kDefaultWindowEps);
  std::vector<Component> comps;
  for (int j = b.j_min; j <= b.j_max; ++j) {
    comps.push_back({sample_normal({p.mu_mu, p.sigma_mu * p.sigma_mu}, rng), 0.5 * var});
  }
  p.window = ComponentWindow(b.j_min, std::move(comps));

  s.z.resize(n);
  s.alloc.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TruncatedNormalParams tn{{eta_[i], sigma_[i] * sigma_[i]}, b.j_min - 1.0, static_cast<double>(b.j_max)};
    s.z[i] = sample_truncated_normal(tn, rng);
    s.alloc[i] = static_cast<int>(std::ceil(s.z[i]));
  }
  return s;
}

void GibbsSampler::refresh_links(const ParameterState& state) {
  const auto& p = state.params;
  const std::size_t n = data_.size();
  for (std::size_t i = 0; i < n; ++i) {
    eta_[i] = eta(p.beta, data_.r[i], data_.indicator[i]);
    sigma_[i] = sigma_link(p.lambda, data_.r[i], data_.indicator[i]);
  }
  for (int t = 0; t < 2; ++t) {
    eta_[n + static_cast<std::size_t>(t)] = eta(p.beta, data_.cutoff, t);
    sigma_[n + static_cast<std::size_t>(t)] = sigma_link(p.lambda, data_.cutoff, t);
  }
}

void GibbsSampler::refresh_window(ParameterState& state, RandomStream& rng) {
  refresh_links(state);
  const WindowBounds b = active_window(eta_, sigma_, kDefaultWindowEps);
  auto& p = state.params;
  p.window.rewindow(b.j_min, b.j_max, [&](int) { return prior_component(p, rng); });
}

void GibbsSampler::cover_links(ParameterState& state, RandomStream& rng) {
  refresh_links(state);
  const WindowBounds b = active_window(eta_, sigma_, kDefaultWindowEps);
  auto& p = state.params;
  const int lo = std::min(b.j_min, p.window.j_min());
  const int hi = std::max(b.j_max, p.window.j_max());
  if (lo == p.window.j_min() && hi == p.window.j_max()) return;
  p.window.rewindow(lo, hi, [&](int) { return prior_component(p, rng); });
}

void GibbsSampler::allocate(ParameterState& state, RandomStream& rng) {
  auto& p = state.params;
  auto& w = p.window;
  const std::size_t n = data_.size();
  const std::size_t J = w.size();
  const bool binary = data_.kind == ModelKind::Binary;

  // Per-component likelihood constants.
  std::vector<double> inv_var(J), log_norm(J), log_p1(J), log_p0(J);
  for (std::size_t k = 0; k < J; ++k) {
    const Component& c = w.components()[k];
    inv_var[k] = 1.0 / c.variance;
    log_norm[k] = -kLogSqrt2Pi - 0.5 * std::log(c.variance);
    if (binary) {
      const double m = c.mean / std::sqrt(c.variance);
      log_p1[k] = log_normal_cdf(m);
      log_p0[k] = log_normal_cdf(-m);
    }
  }

  const int j_min = w.j_min();
  const int j_max = w.j_max();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = eta_[i];
    const double s = sigma_[i];
    int lo = j_min;
    int hi = j_max;
    const double reach = kWeightReach * s + 1.0;
    if (reach < 1e8) {
      lo = static_cast<int>(std::clamp(std::floor(e - reach), double(j_min), double(j_max)));
      hi = static_cast<int>(std::clamp(std::ceil(e + reach), double(j_min), double(j_max)));
    }
    const std::size_t m = static_cast<std::size_t>(hi - lo + 1);
    boundary_tail_.resize(m + 1);
    log_prob_.resize(m);
    double prev_x = (lo - 1.0 - e) / s;
    double prev_tail = boundary_tail(prev_x);
    double best = kNegInf;
    for (std::size_t k = 0; k < m; ++k) {
      const int j = lo + static_cast<int>(k);
      const double x = (j - e) / s;
      const double tail = boundary_tail(x);
      const double wj = interval_weight(prev_x, prev_tail, x, tail);
      prev_x = x;
      prev_tail = tail;
      double lp = kNegInf;
      if (wj > 0.0) {
        const std::size_t c = static_cast<std::size_t>(j - j_min);
        double ll;
        if (binary) {
          ll = data_.outcome[i] > 0.5 ? log_p1[c] : log_p0[c];
        } else {
          const double d = data_.outcome[i] - w.components()[c].mean;
          ll = log_norm[c] - 0.5 * d * d * inv_var[c];
        }
        lp = std::log(wj) + ll;
      }
      log_prob_[k] = lp;
      best = std::max(best, lp);
    }
    if (!std::isfinite(best)) {
      throw NumericalError("allocation: observation " + std::to_string(i) +
                           " has zero probability under every window component; " + dump_state(state));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      log_prob_[k] = std::exp(log_prob_[k] - best);
      total += log_prob_[k];
    }
    double u = rng.uniform() * total;
    std::size_t pick = m - 1;
    for (std::size_t k = 0; k < m; ++k) {
      u -= log_prob_[k];
      if (u <= 0.0 && log_prob_[k] > 0.0) {
        pick = k;
        break;
      }
    }
    while (log_prob_[pick] <= 0.0) --pick;  // rounding fell past the last positive mass
    state.alloc[i] = lo + static_cast<int>(pick);

    if (binary) {
      const Component& c = w.at(state.alloc[i]);
      const bool positive = data_.outcome[i] > 0.5;
      TruncatedNormalParams tn{{c.mean, c.variance},
                               positive ? 0.0 : -std::numeric_limits<double>::infinity(),
                               positive ? std::numeric_limits<double>::infinity() : 0.0};
      state.latent_outcome[i] = sample_truncated_normal(tn, rng);
    }
  }
}

void GibbsSampler::draw_latents(ParameterState& state, RandomStream& rng) {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double j = static_cast<double>(state.alloc[i]);
    TruncatedNormalParams tn{{eta_[i], sigma_[i] * sigma_[i]}, j - 1.0, j};
    state.z[i] = sample_truncated_normal(tn, rng);
  }
}

void GibbsSampler::update_components(ParameterState& state, RandomStream& rng) {
  auto& p = state.params;
  auto& w = p.window;
  const std::size_t J = w.size();
  counts_.assign(J, 0.0);
  means_.assign(J, 0.0);
  m2_.assign(J, 0.0);
  const auto y = working_outcome(state);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t k = static_cast<std::size_t>(state.alloc[i] - w.j_min());
    counts_[k] += 1.0;
    const double d = y[i] - means_[k];
    means_[k] += d / counts_[k];
    m2_[k] += d * (y[i] - means_[k]);
  }
  for (std::size_t k = 0; k < J; ++k) {
    Component& c = w.components()[k];
    const auto nk = static_cast<std::size_t>(counts_[k]);
    if (nk == 0) {
      c = prior_component(p, rng);
      continue;
    }
    const NormalParams mean_cond =
        conditionals::component_mean(nk, counts_[k] * means_[k], c.variance, p.mu_mu, p.sigma_mu);
    c.mean = sample_normal(mean_cond, rng);
    const double dev = means_[k] - c.mean;
    const double ss = m2_[k] + counts_[k] * dev * dev;
    c.variance = sample_inverse_gamma(conditionals::component_variance(nk, ss, p.b_sigma), rng);
  }
}

void GibbsSampler::update_hyper(ParameterState& state, RandomStream& rng) {
  auto& p = state.params;
  const auto comps = p.window.components();
  p.mu_mu = sample_normal(conditionals::mu_mu(comps, p.sigma_mu, hp_), rng);

  SliceOptions opts;
  opts.lower = 0.0;
  opts.upper = hp_.b_sigma_mu;
  opts.width = hp_.b_sigma_mu;
  const double mu_mu = p.mu_mu;
  const double bound = hp_.b_sigma_mu;
  p.sigma_mu = slice_sample(
      p.sigma_mu,
      [&](double s) { return conditionals::sigma_mu_log_density(s, comps, mu_mu, bound); }, rng, opts);

  p.b_sigma = sample_gamma(conditionals::b_sigma(comps, hp_), rng);
}

void GibbsSampler::update_beta(ParameterState& state, RandomStream& rng) {
  auto& p = state.params;
  const std::size_t n = data_.size();
  const auto g = conditionals::beta(state.z, std::span(data_.r), data_.indicator, p.lambda, hp_.v);
  const Eigen::Vector3d eps(sample_normal(rng), sample_normal(rng), sample_normal(rng));
  const Eigen::Vector3d draw = g.mean + g.root * eps;
  p.beta = {draw[0], draw[1], draw[2]};
  for (std::size_t i = 0; i < n; ++i) eta_[i] = eta(p.beta, data_.r[i], data_.indicator[i]);
}

void GibbsSampler::update_lambda(ParameterState& state, RandomStream& rng) {
  auto& p = state.params;
  const std::size_t n = data_.size();
  // Squared residuals of z about the current eta.
  std::vector<double> e2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = state.z[i] - eta_[i];
    e2[i] = e * e;
  }
  SliceOptions opts;  // width 1, at most 50 step-outs
  for (int k = 0; k < 3; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    // log f(l) = -l Sx / 2 - (1/2) sum_i a_i exp(-x_ik l) - l^2 / (2v),
    // a_i = e_i^2 exp(-(rest of the linear predictor)).
    std::vector<double> a(n);
    std::vector<double> xk(n);
    double sx = 0.0;
    bool binary_column = true;
    double a_ones = 0.0;
    double a_zeros = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = static_cast<double>(data_.indicator[i]);
      const std::array<double, 3> row{1.0, data_.r[i], xi};
      const double rest = p.lambda[0] * row[0] + p.lambda[1] * row[1] + p.lambda[2] * row[2] -
                          p.lambda[ku] * row[ku];
      a[i] = e2[i] * std::exp(-rest);
      xk[i] = row[ku];
      sx += row[ku];
      if (row[ku] == 1.0) {
        a_ones += a[i];
      } else if (row[ku] == 0.0) {
        a_zeros += a[i];
      } else {
        binary_column = false;
      }
    }
    const double v = hp_.v;
    std::function<double(double)> logf;
    if (binary_column) {
      logf = [=](double l) { return -0.5 * l * sx - 0.5 * (a_ones * std::exp(-l) + a_zeros) - 0.5 * l * l / v; };
    } else {
      logf = [&a, &xk, sx, v](double l) {
        double s = -0.5 * l * sx - 0.5 * l * l / v;
        for (std::size_t i = 0; i < a.size(); ++i) s -= 0.5 * a[i] * std::exp(-xk[i] * l);
        return std::isnan(s) ? kNegInf : s;
      };
    }
    p.lambda[ku] = slice_sample(p.lambda[ku], logf, rng, opts);
  }
  for (std::size_t i = 0; i < n; ++i) sigma_[i] = sigma_link(p.lambda, data_.r[i], data_.indicator[i]);
}

void GibbsSampler::check_finite(const ParameterState& state, const char* step) const {
  const auto& p = state.params;
  bool ok = std::isfinite(p.mu_mu) && std::isfinite(p.sigma_mu) && std::isfinite(p.b_sigma) && p.b_sigma > 0.0;
  for (int k = 0; k < 3; ++k) {
    ok = ok && std::isfinite(p.beta[static_cast<std::size_t>(k)]) &&
         std::isfinite(p.lambda[static_cast<std::size_t>(k)]);
  }
  for (const auto& c : p.window.components()) {
    ok = ok && std::isfinite(c.mean) && std::isfinite(c.variance) && c.variance > 0.0;
  }
  if (!ok) throw NumericalError(std::string("non-finite parameter after ") + step + "; " + dump_state(state));
}

void GibbsSampler::sweep(ParameterState& state, RandomStream& rng) {
  try {
    refresh_window(state, rng);
    allocate(state, rng);
    draw_latents(state, rng);
    update_components(state, rng);
    check_finite(state, "component update");
    update_hyper(state, rng);
    update_beta(state, rng);
    update_lambda(state, rng);
    check_finite(state, "link update");
    cover_links(state, rng);
  } catch (const DomainError& e) {
    throw NumericalError(std::string("gibbs sweep: ") + e.what() + "; " + dump_state(state));
  }
}

ParameterState gibbs_sweep(ParameterState state, const RegressionData& data, const Hyperparams& hp,
                           RandomStream& rng) {
  if (data.kind != ModelKind::Continuous) throw DomainError("gibbs_sweep: continuous-outcome data expected");
  GibbsSampler sampler(data, hp);
  sampler.sweep(state, rng);
  return state;
}

ParameterState binary_sweep(ParameterState state, const RegressionData& data, const Hyperparams& hp,
                            RandomStream& rng) {
  if (data.kind != ModelKind::Binary) throw DomainError("binary_sweep: binary-outcome data expected");
  GibbsSampler sampler(data, hp);
  sampler.sweep(state, rng);
  return state;
}

PosteriorDraws run_chain(const RegressionData& data, const Hyperparams& hp, const McmcConfig& cfg) {
  cfg.validate();
  data.validate();
  hp.validate();

  auto one_chain = [&](std::uint32_t chain) {
    RandomStream rng = RandomStream(cfg.seed).split(chain);
    GibbsSampler sampler(data, hp);
    ParameterState state = sampler.initial_state(rng);
    std::vector<Draw> kept;
    kept.reserve(cfg.retained_per_chain());
    for (std::size_t it = 1; it <= cfg.total_iterations; ++it) {
      sampler.sweep(state, rng);
      if (it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) kept.push_back(make_draw(state, data.cutoff, chain));
    }
    return kept;
  };

  PosteriorDraws out;
  out.kind = data.kind;
  out.cutoff = data.cutoff;
  if (cfg.chains == 1) {
    out.draws = one_chain(0);
    return out;
  }
  std::vector<std::future<std::vector<Draw>>> futures;
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    futures.push_back(std::async(std::launch::async, one_chain, static_cast<std::uint32_t>(c)));
  }
  for (auto& f : futures) {
    auto kept = f.get();
    out.draws.insert(out.draws.end(), std::make_move_iterator(kept.begin()), std::make_move_iterator(kept.end()));
  }
  return out;
}

}  // namespace bnprdd
