#include "bnprdd/causal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bnprdd/error.hpp"

namespace bnprdd {

namespace {

void require_nonzero(const Adherence& den) {
  if (!std::isfinite(den.mean) || std::fabs(den.mean) < kZeroDenominator) {
    std::ostringstream os;
    os << "adherence denominator " << den.mean << " is zero within " << kZeroDenominator
       << "; the ratio estimator is not identified";
    throw ZeroDenominatorError(os.str());
  }
  if (!(den.variance >= 0.0)) throw DomainError("adherence variance must be nonnegative");
}

CausalEffectEstimate contrast(const PosteriorDraws& draws_y, double r0, const FunctionalH& h, int treated,
                              int control) {
  if (draws_y.kind != ModelKind::Continuous) throw DomainError("sharp_effect: continuous-model draws expected");
  const PosteriorMoments hi = posterior_functional(draws_y, h, r0, treated);
  const PosteriorMoments lo = posterior_functional(draws_y, h, r0, control);
  CausalEffectEstimate est;
  est.h = h;
  est.design = Design::Sharp;
  est.point = hi.mean - lo.mean;
  est.posterior_variance = hi.variance + lo.variance;
  est.denominator = {1.0, 0.0};
  return est;
}

}  // namespace

std::string to_string(Design d) {
  switch (d) {
    case Design::Sharp: return "sharp";
    case Design::FuzzyFirstOrder: return "fuzzy-first-order";
    case Design::FuzzySecondOrder: return "fuzzy-second-order";
    case Design::FuzzyPosteriorRatio: return "fuzzy-posterior-ratio";
  }
  return "unknown";
}

std::pair<double, double> CausalEffectEstimate::band95() const {
  const double half = 2.0 * std::sqrt(posterior_variance);
  return {point - half, point + half};
}

bool CausalEffectEstimate::band_excludes_zero() const {
  const auto [lo, hi] = band95();
  return lo > 0.0 || hi < 0.0;
}

CausalEffectEstimate sharp_effect(const PosteriorDraws& draws_y, double r0, const FunctionalH& h) {
  return contrast(draws_y, r0, h, 1, 0);
}

CausalEffectEstimate sharp_effect_swapped(const PosteriorDraws& draws_y, double r0, const FunctionalH& h) {
  return contrast(draws_y, r0, h, 0, 1);
}

Adherence adherence_denominator(const PosteriorDraws& draws_t, double r0) {
  const PosteriorMoments p1 = treatment_probability(draws_t, r0, 1);
  const PosteriorMoments p0 = treatment_probability(draws_t, r0, 0);
  Adherence den{p1.mean - p0.mean, p1.variance + p0.variance};
  require_nonzero(den);
  if (std::fabs(den.mean) <= 2.0 * std::sqrt(den.variance)) {
    std::ostringstream os;
    os << "adherence denominator " << den.mean << " (posterior sd " << std::sqrt(den.variance)
       << ") is indistinguishable from zero; the ratio estimator is not identified";
    throw ZeroDenominatorError(os.str());
  }
  return den;
}

CausalEffectEstimate fuzzy_effect_first_order(const CausalEffectEstimate& sharp, const Adherence& den) {
  require_nonzero(den);
  const double e = den.mean;
  const double tau = sharp.point;
  CausalEffectEstimate est = sharp;
  est.design = Design::FuzzyFirstOrder;
  est.point = tau / e;
  // (tau/e)^2 [V_tau/tau^2 + V_D/e^2], simplified so tau = 0 is finite.
  est.posterior_variance = (sharp.posterior_variance + tau * tau * den.variance / (e * e)) / (e * e);
  est.denominator = den;
  return est;
}

CausalEffectEstimate fuzzy_effect_second_order(const CausalEffectEstimate& sharp, const Adherence& den) {
  CausalEffectEstimate est = fuzzy_effect_first_order(sharp, den);
  est.design = Design::FuzzySecondOrder;
  const double e = den.mean;
  est.point = sharp.point / e + sharp.point * den.variance / (e * e * e);
  return est;
}

CausalEffectEstimate fuzzy_effect_posterior_ratio(const PosteriorDraws& draws_y, const PosteriorDraws& draws_t,
                                                  double r0, const FunctionalH& h) {
  if (draws_y.empty() || draws_t.empty()) throw InsufficientDrawsError("posterior ratio: empty draw set");
  if (draws_y.kind != ModelKind::Continuous || draws_t.kind != ModelKind::Binary) {
    throw DomainError("posterior ratio: need continuous outcome draws and binary treatment draws");
  }
  const std::size_t pairs = std::min(draws_y.size(), draws_t.size());
  std::vector<double> ratios;
  std::vector<double> dens;
  ratios.reserve(pairs);
  for (std::size_t d = 0; d < pairs; ++d) {
    const Parameters& py = draws_y.draws[d].params;
    const Parameters& pt = draws_t.draws[d].params;
    const double num = functional_eval(h, r0, 1, py) - functional_eval(h, r0, 0, py);
    const double den = mixture_at(pt, r0, 1).prob_positive() - mixture_at(pt, r0, 0).prob_positive();
    if (std::fabs(den) < kPairDenominatorFloor) continue;
    ratios.push_back(num / den);
    dens.push_back(den);
  }
  const std::size_t excluded = pairs - ratios.size();
  if (2 * excluded > pairs) {
    throw ZeroDenominatorError("posterior ratio: " + std::to_string(excluded) + " of " + std::to_string(pairs) +
                               " draw pairs have a vanishing adherence denominator");
  }
  CompensatedSum s;
  CompensatedSum sd;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    s.add(ratios[k]);
    sd.add(dens[k]);
  }
  const double m = static_cast<double>(ratios.size());
  const double mean = s.value() / m;
  const double den_mean = sd.value() / m;
  CompensatedSum ss;
  CompensatedSum ssd;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    ss.add((ratios[k] - mean) * (ratios[k] - mean));
    ssd.add((dens[k] - den_mean) * (dens[k] - den_mean));
  }
  CausalEffectEstimate est;
  est.h = h;
  est.design = Design::FuzzyPosteriorRatio;
  est.point = mean;
  est.posterior_variance = ss.value() / m;
  est.denominator = {den_mean, ssd.value() / m};
  est.excluded_pairs = excluded;
  return est;
}

std::vector<CausalEffectEstimate> adherence_sensitivity(const CausalEffectEstimate& sharp,
                                                        std::span<const double> denominators) {
  std::vector<CausalEffectEstimate> out;
  out.reserve(denominators.size());
  for (double d : denominators) {
    if (!std::isfinite(d) || d == 0.0) throw DomainError("adherence sensitivity: denominators must be nonzero");
  }
  for (double d : denominators) out.push_back(fuzzy_effect_first_order(sharp, Adherence{d, 0.0}));
  return out;
}

std::vector<double> default_sensitivity_grid() {
  std::vector<double> g;
  for (int k = 10; k >= -10; --k) {
    if (k != 0) g.push_back(k / 10.0);
  }
  return g;
}

QuantileEffect quantile_effect(const PosteriorDraws& draws_y, double r0, double u,
                               std::optional<Adherence> denominator) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile_effect: u must lie in (0,1)");
  if (draws_y.kind != ModelKind::Continuous) throw DomainError("quantile_effect: continuous-model draws expected");
  const auto control = mixtures_at(draws_y, r0, 0);
  const auto treated = mixtures_at(draws_y, r0, 1);

  QuantileEffect out;
  out.u = u;
  out.quantile_control = predictive_quantile(control, u);
  out.quantile_treated = predictive_quantile(treated, u);

  std::vector<double> q0(control.size());
  std::vector<double> q1(treated.size());
  for (std::size_t d = 0; d < control.size(); ++d) {
    q0[d] = control[d].quantile(u);
    q1[d] = treated[d].quantile(u);
  }
  CausalEffectEstimate sharp;
  sharp.h = FunctionalH::quantile_at(u);
  sharp.design = Design::Sharp;
  sharp.point = out.quantile_treated - out.quantile_control;
  {
    CompensatedSum s0;
    CompensatedSum s1;
    for (std::size_t d = 0; d < q0.size(); ++d) {
      s0.add(q0[d]);
      s1.add(q1[d]);
    }
    const double n = static_cast<double>(q0.size());
    const double m0 = s0.value() / n;
    const double m1 = s1.value() / n;
    CompensatedSum v;
    for (std::size_t d = 0; d < q0.size(); ++d) v.add((q0[d] - m0) * (q0[d] - m0) + (q1[d] - m1) * (q1[d] - m1));
    sharp.posterior_variance = v.value() / n;
  }

  out.evaluation_y = 0.5 * (out.quantile_control + out.quantile_treated);
  const double y = out.evaluation_y;
  if (!denominator) {
    out.estimate = sharp;
    if (control.size() >= kMinDrawsForBand) {
      std::vector<double> f0(control.size());
      std::vector<double> f1(treated.size());
      for (std::size_t d = 0; d < control.size(); ++d) {
        f0[d] = control[d].cdf(y);
        f1[d] = treated[d].cdf(y);
      }
      const double lo0 = percentile(f0, 0.025);
      const double hi0 = percentile(f0, 0.975);
      const double lo1 = percentile(f1, 0.025);
      const double hi1 = percentile(f1, 0.975);
      out.significant = hi0 < lo1 || hi1 < lo0;
    }
    return out;
  }

  out.estimate = fuzzy_effect_first_order(sharp, *denominator);
  // CDF contrast at y scaled by the denominator, with its first-order variance.
  CausalEffectEstimate cdf_sharp;
  cdf_sharp.h = FunctionalH::indicator_leq(y);
  {
    std::vector<double> f0(control.size());
    std::vector<double> f1(treated.size());
    for (std::size_t d = 0; d < control.size(); ++d) {
      f0[d] = control[d].cdf(y);
      f1[d] = treated[d].cdf(y);
    }
    const double n = static_cast<double>(f0.size());
    CompensatedSum s0;
    CompensatedSum s1;
    for (std::size_t d = 0; d < f0.size(); ++d) {
      s0.add(f0[d]);
      s1.add(f1[d]);
    }
    const double m0 = s0.value() / n;
    const double m1 = s1.value() / n;
    CompensatedSum v;
    for (std::size_t d = 0; d < f0.size(); ++d) v.add((f0[d] - m0) * (f0[d] - m0) + (f1[d] - m1) * (f1[d] - m1));
    cdf_sharp.point = m1 - m0;
    cdf_sharp.posterior_variance = v.value() / n;
  }
  const CausalEffectEstimate cdf_fuzzy = fuzzy_effect_first_order(cdf_sharp, *denominator);
  out.significant = std::fabs(cdf_sharp.point) > 4.0 * std::sqrt(cdf_fuzzy.posterior_variance);
  return out;
}

}  // namespace bnprdd
