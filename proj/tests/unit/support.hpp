#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "bnprdd/dist.hpp"
#include "bnprdd/model.hpp"
#include "bnprdd/sampler.hpp"

namespace testing {

inline double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double var_of(const std::vector<double>& x) {
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> x, Cdf cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Parameters with one window component at index j and links fixed so
/// that all weight sits on it (sigma tiny, eta inside (j-1, j]).
inline bnprdd::Parameters single_component(double mean, double variance, int j = 1) {
  bnprdd::Parameters p;
  p.window = bnprdd::ComponentWindow(j, {{mean, variance}});
  p.beta = {j - 0.5, 0.0, 0.0};
  p.lambda = {-60.0, 0.0, 0.0};
  return p;
}

/// A draw set made of copies of one parameter value.
inline bnprdd::PosteriorDraws repeated(const bnprdd::Parameters& p, std::size_t n,
                                       bnprdd::ModelKind kind = bnprdd::ModelKind::Continuous) {
  bnprdd::PosteriorDraws d;
  d.kind = kind;
  for (std::size_t k = 0; k < n; ++k) {
    bnprdd::Draw draw;
    draw.params = p;
    d.draws.push_back(draw);
  }
  return d;
}

}  // namespace testing

namespace testing {

/// A random but valid parameter value whose window covers r in [-1, 1]
/// for both t.
inline bnprdd::Parameters random_state(bnprdd::RandomStream& rng) {
  using namespace bnprdd;
  Parameters p;
  for (auto& b : p.beta) b = sample_normal({0.0, 4.0}, rng);
  for (auto& l : p.lambda) l = sample_normal({0.0, 1.0}, rng);
  std::vector<double> etas;
  std::vector<double> sigmas;
  for (double r : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    for (int t : {0, 1}) {
      etas.push_back(eta(p.beta, r, t));
      sigmas.push_back(sigma_link(p.lambda, r, t));
    }
  }
  const WindowBounds w = active_window(etas, sigmas);
  std::vector<Component> comps;
  for (int j = w.j_min; j <= w.j_max; ++j) {
    comps.push_back({sample_normal({0.0, 9.0}, rng), sample_uniform(0.05, 3.0, rng)});
  }
  p.window = ComponentWindow(w.j_min, std::move(comps));
  p.mu_mu = 0.0;
  p.sigma_mu = 3.0;
  p.b_sigma = 1.0;
  return p;
}

}  // namespace testing

namespace testing {

/// All weight on component 0 (mean0, var0) at t = 0 and on component 1
/// (mean1, var1) at t = 1, for every r in [-1, 1].
inline bnprdd::Parameters two_sided(double mean0, double var0, double mean1, double var1) {
  bnprdd::Parameters p;
  p.window = bnprdd::ComponentWindow(0, {{mean0, var0}, {mean1, var1}});
  p.beta = {-0.5, 0.0, 1.0};
  p.lambda = {-60.0, 0.0, 0.0};
  return p;
}

}  // namespace testing
