#pragma once

// Cutoff causal effects. The sharp estimator contrasts posterior
// expectations of a functional H at (r0, 1) and (r0, 0); fuzzy estimators
// divide by the adherence denominator D_T, the jump in Pr(T = 1) at r0
// estimated by a separate binary-outcome fit.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnprdd/model.hpp"
#include "bnprdd/predictive.hpp"
#include "bnprdd/sampler.hpp"

namespace bnprdd {

enum class Design { Sharp, FuzzyFirstOrder, FuzzySecondOrder, FuzzyPosteriorRatio };

std::string to_string(Design d);

struct Adherence {
  double mean = 1.0;      // E_n(D_T)
  double variance = 0.0;  // V(D_T) = V_n(T|r0,1) + V_n(T|r0,0)
};

struct CausalEffectEstimate {
  FunctionalH h;
  Design design = Design::Sharp;
  double point = 0.0;
  double posterior_variance = 0.0;
  Adherence denominator;
  std::size_t excluded_pairs = 0;  // posterior-ratio estimator only

  /// point -/+ 2 sqrt(posterior_variance)
  std::pair<double, double> band95() const;
  bool band_excludes_zero() const;
};

/// Sharp estimator from continuous-model draws fitted on (r, t).
CausalEffectEstimate sharp_effect(const PosteriorDraws& draws_y, double r0, const FunctionalH& h);

/// Treatment-side label swap: the same two predictive evaluations with
/// t = 0 and t = 1 exchanged.
CausalEffectEstimate sharp_effect_swapped(const PosteriorDraws& draws_y, double r0, const FunctionalH& h);

constexpr double kZeroDenominator = 1e-6;

/// E_n(D_T) and V(D_T) from binary-model draws fitted on (r, 1{r >= r0}).
/// Throws ZeroDenominatorError when |E_n(D_T)| < 1e-6 or when the
/// approximate 95% band E_n(D_T) -/+ 2 sqrt(V(D_T)) contains zero.
Adherence adherence_denominator(const PosteriorDraws& draws_t, double r0);

/// tau_S / E_n(D_T), with the ratio-of-random-variables variance
/// (V_n(tau_S) + tau_S^2 V(D_T) / E_n(D_T)^2) / E_n(D_T)^2.
CausalEffectEstimate fuzzy_effect_first_order(const CausalEffectEstimate& sharp, const Adherence& den);

/// First-order point plus tau_S V(D_T) / E_n(D_T)^3; variance as first order.
CausalEffectEstimate fuzzy_effect_second_order(const CausalEffectEstimate& sharp, const Adherence& den);

constexpr double kPairDenominatorFloor = 1e-8;

/// Posterior mean of the per-draw-pair ratio, pairing draws by index.
/// Pairs with |denominator| < 1e-8 are excluded and counted; more than
/// half excluded is an error.
CausalEffectEstimate fuzzy_effect_posterior_ratio(const PosteriorDraws& draws_y, const PosteriorDraws& draws_t,
                                                  double r0, const FunctionalH& h);

/// One fixed-denominator estimate per entry: point tau_S/d, variance V_n(tau_S)/d^2.
std::vector<CausalEffectEstimate> adherence_sensitivity(const CausalEffectEstimate& sharp,
                                                        std::span<const double> denominators);

/// 1, .9, .8, ..., .1, -.1, ..., -1 (zero omitted).
std::vector<double> default_sensitivity_grid();

struct QuantileEffect {
  CausalEffectEstimate estimate;
  double u = 0.5;
  double quantile_control = 0.0;
  double quantile_treated = 0.0;
  double evaluation_y = 0.0;  // where the P-P intervals were compared
  bool significant = false;
};

/// F_n^{-1}(u|r0,1) - F_n^{-1}(u|r0,0), optionally scaled by an adherence
/// denominator. Significance: the 95% intervals of F(y|r0,0) and F(y|r0,1)
/// do not overlap at y midway between the two quantiles. In the fuzzy case
/// the intervals are F_n(y|r0,a) -/+ 2 sd of the scaled CDF contrast.
QuantileEffect quantile_effect(const PosteriorDraws& draws_y, double r0, double u,
                               std::optional<Adherence> denominator = std::nullopt);

}  // namespace bnprdd
