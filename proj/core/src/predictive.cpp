#include "bnprdd/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bnprdd/error.hpp"

namespace bnprdd {

namespace {

void require_draws(const PosteriorDraws& draws) {
  if (draws.empty()) throw InsufficientDrawsError("no posterior draws");
}

// Shifted by the first value so that a constant sample is reproduced exactly.
PosteriorMoments moments_of(std::span<const double> values) {
  const double shift = values.front();
  CompensatedSum s;
  for (double v : values) s.add(v - shift);
  const double n = static_cast<double>(values.size());
  const double offset = s.value() / n;
  CompensatedSum ss;
  for (double v : values) ss.add((v - shift - offset) * (v - shift - offset));
  return {shift + offset, ss.value() / n};
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::fabs(sum_) >= std::fabs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

void PredictiveQuery::validate() const {
  if (t != 0 && t != 1) throw DomainError("predictive query: t must be 0 or 1");
  if (grid.size() < 16) throw DomainError("predictive query: grid needs at least 16 points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw DomainError("predictive query: grid must be strictly increasing");
  }
  for (double u : quantiles) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("predictive query: quantile levels must lie in (0,1)");
  }
}

std::vector<double> default_grid(std::span<const double> outcomes, std::size_t points) {
  if (outcomes.empty()) throw DomainError("default_grid: no outcomes");
  if (points < 16) throw DomainError("default_grid: need at least 16 points");
  const auto [lo_it, hi_it] = std::minmax_element(outcomes.begin(), outcomes.end());
  const PosteriorMoments m = moments_of(outcomes);
  double sd = std::sqrt(m.variance * static_cast<double>(outcomes.size()) /
                        std::max<double>(1.0, static_cast<double>(outcomes.size()) - 1.0));
  if (!(sd > 0.0)) sd = 1.0;
  const double lo = *lo_it - 3.0 * sd;
  const double hi = *hi_it + 3.0 * sd;
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return grid;
}

std::vector<Mixture> mixtures_at(const PosteriorDraws& draws, double r, int t) {
  std::vector<Mixture> out;
  out.reserve(draws.size());
  for (const auto& d : draws.draws) out.push_back(mixture_at(d.params, r, t));
  return out;
}

std::vector<double> functional_trace(const PosteriorDraws& draws, const FunctionalH& h, double r, int t) {
  std::vector<double> values;
  values.reserve(draws.size());
  for (const auto& d : draws.draws) values.push_back(functional_eval(h, mixture_at(d.params, r, t)));
  return values;
}

PosteriorMoments posterior_functional(const PosteriorDraws& draws, const FunctionalH& h, double r, int t) {
  require_draws(draws);
  const auto values = functional_trace(draws, h, r, t);
  return moments_of(values);
}

PosteriorMoments predictive_moments(const PosteriorDraws& draws, double r, int t) {
  require_draws(draws);
  std::vector<double> means;
  std::vector<double> vars;
  means.reserve(draws.size());
  vars.reserve(draws.size());
  for (const auto& d : draws.draws) {
    const Mixture m = mixture_at(d.params, r, t);
    means.push_back(m.mean());
    vars.push_back(m.variance());
  }
  CompensatedSum sm;
  for (double v : means) sm.add(v);
  const double n = static_cast<double>(means.size());
  const double en = sm.value() / n;
  CompensatedSum sv;
  for (std::size_t k = 0; k < means.size(); ++k) {
    const double d = means[k] - en;
    sv.add(vars[k] + d * d);
  }
  return {en, sv.value() / n};
}

PosteriorMoments treatment_probability(const PosteriorDraws& draws, double r, int a) {
  require_draws(draws);
  if (draws.kind != ModelKind::Binary) throw DomainError("treatment_probability: binary-model draws expected");
  std::vector<double> p;
  p.reserve(draws.size());
  for (const auto& d : draws.draws) p.push_back(mixture_at(d.params, r, a).prob_positive());
  return moments_of(p);
}

double averaged_cdf(std::span<const Mixture> mixtures, double y) {
  CompensatedSum s;
  for (const auto& m : mixtures) s.add(m.cdf(y));
  return s.value() / static_cast<double>(mixtures.size());
}

double predictive_quantile(std::span<const Mixture> mixtures, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("predictive_quantile: u must lie in (0,1)");
  if (mixtures.empty()) throw InsufficientDrawsError("no posterior draws");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& m : mixtures) {
    const auto [a, b] = m.support_bracket();
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  double width = std::max(hi - lo, 1.0);
  while (averaged_cdf(mixtures, lo) > u) {
    lo -= width;
    width *= 2.0;
    if (!std::isfinite(lo)) throw NumericalError("predictive_quantile: lower bracket overflow");
  }
  width = std::max(hi - lo, 1.0);
  while (averaged_cdf(mixtures, hi) < u) {
    hi += width;
    width *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("predictive_quantile: upper bracket overflow");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo < 1e-12) break;
    if (averaged_cdf(mixtures, mid) < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double predictive_quantile(const PosteriorDraws& draws, double r, int t, double u) {
  require_draws(draws);
  const auto mixtures = mixtures_at(draws, r, t);
  return predictive_quantile(mixtures, u);
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw InsufficientDrawsError("percentile of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto k = static_cast<std::size_t>(std::floor(h));
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (h - static_cast<double>(k)) * (v[k + 1] - v[k]);
}

namespace {

CredibleBand band_from_mixtures(std::span<const Mixture> mixtures, std::span<const double> grid) {
  if (mixtures.size() < kMinDrawsForBand) {
    throw InsufficientDrawsError("credible band needs at least 40 draws, got " + std::to_string(mixtures.size()));
  }
  CredibleBand band;
  band.lower.resize(grid.size());
  band.upper.resize(grid.size());
  std::vector<double> per_draw(mixtures.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t d = 0; d < mixtures.size(); ++d) per_draw[d] = mixtures[d].cdf(grid[g]);
    band.lower[g] = percentile(per_draw, 0.025);
    band.upper[g] = percentile(per_draw, 0.975);
  }
  return band;
}

}  // namespace

CredibleBand cdf_credible_band(const PosteriorDraws& draws, double r, int t, std::span<const double> grid) {
  if (draws.size() < kMinDrawsForBand) {
    throw InsufficientDrawsError("credible band needs at least 40 draws, got " + std::to_string(draws.size()));
  }
  const auto mixtures = mixtures_at(draws, r, t);
  return band_from_mixtures(mixtures, grid);
}

PredictiveSummary predict(const PosteriorDraws& draws, const PredictiveQuery& query) {
  require_draws(draws);
  query.validate();
  const auto mixtures = mixtures_at(draws, query.r, query.t);
  const double n = static_cast<double>(mixtures.size());

  PredictiveSummary out;
  out.grid = query.grid;
  out.density.resize(query.grid.size());
  out.cdf.resize(query.grid.size());
  for (std::size_t g = 0; g < query.grid.size(); ++g) {
    CompensatedSum f;
    CompensatedSum c;
    for (const auto& m : mixtures) {
      f.add(m.density(query.grid[g]));
      c.add(m.cdf(query.grid[g]));
    }
    out.density[g] = f.value() / n;
    out.cdf[g] = std::min(1.0, c.value() / n);
  }
  // Averaging can break monotonicity by an ulp; restore it.
  for (std::size_t g = 1; g < out.cdf.size(); ++g) out.cdf[g] = std::max(out.cdf[g], out.cdf[g - 1]);

  const PosteriorMoments pm = predictive_moments(draws, query.r, query.t);
  out.mean = pm.mean;
  out.variance = pm.variance;
  for (double u : query.quantiles) out.quantiles.emplace_back(u, predictive_quantile(mixtures, u));
  if (mixtures.size() >= kMinDrawsForBand) out.cdf_band = band_from_mixtures(mixtures, query.grid);
  return out;
}

std::vector<PpRow> pp_plot_data(const PosteriorDraws& draws, double r0, std::span<const double> grid) {
  if (draws.size() < kMinDrawsForBand) {
    throw InsufficientDrawsError("P-P table needs at least 40 draws, got " + std::to_string(draws.size()));
  }
  const auto control = mixtures_at(draws, r0, 0);
  const auto treated = mixtures_at(draws, r0, 1);
  const CredibleBand band0 = band_from_mixtures(control, grid);
  const CredibleBand band1 = band_from_mixtures(treated, grid);
  std::vector<PpRow> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    PpRow& row = rows[g];
    row.y = grid[g];
    row.cdf_control = averaged_cdf(control, grid[g]);
    row.cdf_treated = averaged_cdf(treated, grid[g]);
    row.control_lower = band0.lower[g];
    row.control_upper = band0.upper[g];
    row.treated_lower = band1.lower[g];
    row.treated_upper = band1.upper[g];
    row.overlap = !(row.control_upper < row.treated_lower || row.treated_upper < row.control_lower);
  }
  return rows;
}

}  // namespace bnprdd
