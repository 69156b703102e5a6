#include "bnprdd/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "bnprdd/error.hpp"

namespace bnprdd {

namespace {

double mean_of(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

}  // namespace

FitReport residuals_from_moments(std::span<const double> y, std::span<const double> mean,
                                 std::span<const double> variance) {
  if (y.size() != mean.size() || y.size() != variance.size()) {
    throw DomainError("residuals: length mismatch");
  }
  FitReport rep;
  rep.predictive_mean.assign(mean.begin(), mean.end());
  rep.predictive_variance.assign(variance.begin(), variance.end());
  rep.z.resize(y.size());
  rep.outlier.assign(y.size(), false);
  rep.degenerate.assign(y.size(), false);
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!(variance[i] > 0.0) || !std::isfinite(variance[i])) {
      rep.z[i] = std::numeric_limits<double>::quiet_NaN();
      rep.degenerate[i] = true;
      ++rep.degenerate_count;
      continue;
    }
    rep.z[i] = (y[i] - mean[i]) / std::sqrt(variance[i]);
    if (std::fabs(rep.z[i]) > kOutlierThreshold) {
      rep.outlier[i] = true;
      ++rep.outlier_count;
    }
  }
  if (!y.empty()) rep.r_squared = r_squared(y, mean);
  return rep;
}

FitReport residuals(const PosteriorDraws& draws, const RegressionData& data) {
  if (draws.empty()) throw InsufficientDrawsError("residuals: no posterior draws");
  if (draws.kind != data.kind) throw DomainError("residuals: draws and data come from different model kinds");
  std::vector<double> mean(data.size());
  std::vector<double> var(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PosteriorMoments m = predictive_moments(draws, data.r[i], data.indicator[i]);
    mean[i] = m.mean;
    var[i] = m.variance;
  }
  return residuals_from_moments(data.outcome, mean, var);
}

std::optional<double> r_squared(std::span<const double> y, std::span<const double> fitted) {
  if (y.size() != fitted.size()) throw DomainError("r_squared: length mismatch");
  if (y.empty()) return std::nullopt;
  const double ybar = mean_of(y);
  CompensatedSum res;
  CompensatedSum tot;
  for (std::size_t i = 0; i < y.size(); ++i) {
    res.add((y[i] - fitted[i]) * (y[i] - fitted[i]));
    tot.add((y[i] - ybar) * (y[i] - ybar));
  }
  if (!(tot.value() > 0.0)) return std::nullopt;
  return 1.0 - res.value() / tot.value();
}

std::optional<double> r_squared(const PosteriorDraws& draws, const RegressionData& data) {
  return residuals(draws, data).r_squared;
}

BatchMeans batch_means_ci(std::span<const double> trace, std::size_t batches) {
  if (batches < 2) throw DomainError("batch_means_ci: need at least 2 batches");
  if (trace.size() < 2 * batches) {
    throw InsufficientDrawsError("batch_means_ci: series of length " + std::to_string(trace.size()) +
                                 " is shorter than 2 x " + std::to_string(batches) + " batches");
  }
  const std::size_t len = trace.size() / batches;
  const std::size_t skip = trace.size() - len * batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean_of(trace.subspan(skip + b * len, len));
  const double grand = mean_of(means);
  CompensatedSum ss;
  for (double m : means) ss.add((m - grand) * (m - grand));
  const double sd = std::sqrt(ss.value() / static_cast<double>(batches - 1));
  return {grand, 2.0 * sd / std::sqrt(static_cast<double>(batches))};
}

std::vector<Trace> parameter_traces(const PosteriorDraws& draws) {
  std::vector<Trace> out = {{"beta0", {}},  {"beta1", {}},    {"beta2", {}},   {"lambda0", {}}, {"lambda1", {}},
                            {"lambda2", {}}, {"mu_mu", {}},   {"sigma_mu", {}}, {"b_sigma", {}},
                            {"occupied", {}}};
  for (auto& tr : out) tr.values.reserve(draws.size());
  for (const auto& d : draws.draws) {
    const Parameters& p = d.params;
    for (int k = 0; k < 3; ++k) {
      out[k].values.push_back(p.beta[k]);
      out[3 + k].values.push_back(p.lambda[k]);
    }
    out[6].values.push_back(p.mu_mu);
    out[7].values.push_back(p.sigma_mu);
    out[8].values.push_back(p.b_sigma);
    out[9].values.push_back(static_cast<double>(d.occupied));
  }
  return out;
}

bool ConvergenceReport::all_within_target() const {
  for (const auto& e : entries) {
    if (!e.within_target) return false;
  }
  return true;
}

ConvergenceReport convergence_report(std::span<const Trace> traces, double target_half_width,
                                     std::size_t batches) {
  if (!(target_half_width > 0.0)) throw DomainError("convergence_report: target half-width must be positive");
  ConvergenceReport rep;
  rep.target_half_width = target_half_width;
  rep.batches = batches;
  for (const auto& tr : traces) {
    ConvergenceEntry e;
    e.name = tr.name;
    e.ci = batch_means_ci(tr.values, batches);
    e.within_target = e.ci.half_width <= target_half_width;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

}  // namespace bnprdd
