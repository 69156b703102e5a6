#include "bnprdd/datasim.hpp"

#include <algorithm>
#include <cmath>

#include "bnprdd/dist.hpp"
#include "bnprdd/error.hpp"
#include "bnprdd/rng.hpp"

namespace bnprdd {

namespace {

double noise_mean(const SimSpec& s) {
  if (const auto* m = std::get_if<MixtureNoise>(&s.noise)) return m->weight * m->mean1 + (1.0 - m->weight) * m->mean2;
  return 0.0;
}

double noise_variance(const SimSpec& s) {
  if (const auto* m = std::get_if<MixtureNoise>(&s.noise)) {
    const double mu = noise_mean(s);
    return m->weight * (m->sd1 * m->sd1 + (m->mean1 - mu) * (m->mean1 - mu)) +
           (1.0 - m->weight) * (m->sd2 * m->sd2 + (m->mean2 - mu) * (m->mean2 - mu));
  }
  const double sd = std::get<NormalNoise>(s.noise).sd;
  return sd * sd;
}

double noise_cdf(const SimSpec& s, double e) {
  if (const auto* m = std::get_if<MixtureNoise>(&s.noise)) {
    return m->weight * normal_cdf((e - m->mean1) / m->sd1) + (1.0 - m->weight) * normal_cdf((e - m->mean2) / m->sd2);
  }
  return normal_cdf(e / std::get<NormalNoise>(s.noise).sd);
}

double noise_quantile(const SimSpec& s, double u) {
  if (const auto* n = std::get_if<NormalNoise>(&s.noise)) return n->sd * normal_quantile(u);
  const auto& m = std::get<MixtureNoise>(s.noise);
  double lo = std::min(m.mean1 - 40.0 * m.sd1, m.mean2 - 40.0 * m.sd2);
  double hi = std::max(m.mean1 + 40.0 * m.sd1, m.mean2 + 40.0 * m.sd2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (noise_cdf(s, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double sample_noise(const SimSpec& s, RandomStream& rng) {
  if (const auto* m = std::get_if<MixtureNoise>(&s.noise)) {
    if (rng.uniform() < m->weight) return sample_normal({m->mean1, m->sd1 * m->sd1}, rng);
    return sample_normal({m->mean2, m->sd2 * m->sd2}, rng);
  }
  const double sd = std::get<NormalNoise>(s.noise).sd;
  return sample_normal({0.0, sd * sd}, rng);
}

double m0_at(const SimSpec& s, double r) {
  double acc = 0.0;
  const double x = r - s.r0;
  for (auto it = s.m0.rbegin(); it != s.m0.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double scale(const SimSpec& s, int t) { return t == 1 ? std::exp(0.5 * s.delta_logvar) : 1.0; }

}  // namespace

void SimSpec::validate() const {
  if (n < 50) throw DomainError("simulate: n must be at least 50");
  if (!std::isfinite(r0)) throw DomainError("simulate: cutoff must be finite");
  if (!(adherence_above > 0.0 && adherence_above <= 1.0) || !(adherence_below > 0.0 && adherence_below <= 1.0)) {
    throw DomainError("simulate: adherence must lie in (0,1]");
  }
  if (!std::isfinite(delta_mean) || !std::isfinite(delta_logvar)) throw DomainError("simulate: shifts must be finite");
  for (double c : m0) {
    if (!std::isfinite(c)) throw DomainError("simulate: m0 coefficients must be finite");
  }
  if (const auto* u = std::get_if<UniformR>(&r_dist)) {
    if (!(u->a < u->b)) throw DomainError("simulate: uniform r needs a < b");
  } else if (!(std::get<NormalR>(r_dist).sd > 0.0)) {
    throw DomainError("simulate: normal r needs sd > 0");
  }
  if (const auto* m = std::get_if<MixtureNoise>(&noise)) {
    if (!(m->weight > 0.0 && m->weight < 1.0) || !(m->sd1 > 0.0) || !(m->sd2 > 0.0)) {
      throw DomainError("simulate: invalid mixture noise");
    }
  } else if (!(std::get<NormalNoise>(noise).sd > 0.0)) {
    throw DomainError("simulate: noise sd must be positive");
  }
}

double GroundTruth::outcome_mean(int t) const {
  return m0_at(spec, spec.r0) + spec.delta_mean * t + scale(spec, t) * noise_mean(spec);
}

double GroundTruth::outcome_variance(int t) const {
  const double s = scale(spec, t);
  return s * s * noise_variance(spec);
}

double GroundTruth::outcome_cdf(double y, int t) const {
  const double loc = m0_at(spec, spec.r0) + spec.delta_mean * t;
  return noise_cdf(spec, (y - loc) / scale(spec, t));
}

double GroundTruth::outcome_quantile(double u, int t) const {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("outcome_quantile: u must lie in (0,1)");
  return m0_at(spec, spec.r0) + spec.delta_mean * t + scale(spec, t) * noise_quantile(spec, u);
}

double GroundTruth::quantile_effect(double u) const { return outcome_quantile(u, 1) - outcome_quantile(u, 0); }

std::vector<double> default_quantile_levels() { return {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95}; }

GroundTruth ground_truth(const SimSpec& spec) {
  spec.validate();
  GroundTruth g;
  g.spec = spec;
  g.mean_effect = g.outcome_mean(1) - g.outcome_mean(0);
  g.variance_effect = g.outcome_variance(1) - g.outcome_variance(0);
  g.compliance_jump = spec.adherence_above - (1.0 - spec.adherence_below);
  for (double u : default_quantile_levels()) g.quantile_effects.emplace_back(u, g.quantile_effect(u));
  return g;
}

Simulation simulate(const SimSpec& spec) {
  Simulation sim;
  sim.truth = ground_truth(spec);
  RandomStream rng(spec.seed);
  Dataset& d = sim.data;
  d.cutoff = spec.r0;
  d.y.resize(spec.n);
  d.r.resize(spec.n);
  d.t.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    double r;
    if (const auto* u = std::get_if<UniformR>(&spec.r_dist)) {
      r = u->a + (u->b - u->a) * rng.uniform();
    } else {
      const auto& nr = std::get<NormalR>(spec.r_dist);
      r = sample_normal({nr.mean, nr.sd * nr.sd}, rng);
    }
    const bool assigned = r >= spec.r0;
    const double u = rng.uniform();
    int t;
    if (assigned) {
      t = u < spec.adherence_above ? 1 : 0;
    } else {
      t = u < spec.adherence_below ? 0 : 1;
    }
    const double e = sample_noise(spec, rng);
    d.r[i] = r;
    d.t[i] = t;
    d.y[i] = m0_at(spec, r) + spec.delta_mean * t + scale(spec, t) * e;
  }
  return sim;
}

}  // namespace bnprdd
