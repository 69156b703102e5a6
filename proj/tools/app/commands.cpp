#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>
#include <system_error>

#include "bnprdd/causal.hpp"
#include "bnprdd/diagnostics.hpp"
#include "bnprdd/error.hpp"
#include "bnprdd/io.hpp"
#include "bnprdd/log.hpp"
#include "bnprdd/predictive.hpp"

namespace bnprdd::cli {

namespace {

struct Prepared {
  Dataset raw;
  Dataset model;  // transformed
  Transform transform;
};

Prepared prepare(const RunConfig& c) {
  Prepared p;
  ColumnMapping map{c.y_col, c.r_col, c.t_col};
  p.raw = read_dataset_csv(c.data, map, c.cutoff);
  const auto [rmin, rmax] = std::minmax_element(p.raw.r.begin(), p.raw.r.end());
  if (c.cutoff < *rmin || c.cutoff > *rmax) {
    warn_once("cli.cutoff_range", "cutoff lies outside the observed range of r");
  }
  if (c.standardize_y) {
    const double n = static_cast<double>(p.raw.size());
    const double mean = std::accumulate(p.raw.y.begin(), p.raw.y.end(), 0.0) / n;
    double ss = 0.0;
    for (double y : p.raw.y) ss += (y - mean) * (y - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw DataError("cannot standardize a constant outcome; use --standardize-y off");
    p.transform.y_mean = mean;
    p.transform.y_sd = sd;
  }
  if (c.center_r) p.transform.r_shift = c.cutoff;
  p.model = p.raw;
  for (auto& y : p.model.y) y = p.transform.y_to_model(y);
  for (auto& r : p.model.r) r = p.transform.r_to_model(r);
  p.model.cutoff = p.transform.r_to_model(c.cutoff);
  return p;
}

json transform_json(const Transform& t) {
  return {{"y_mean", t.y_mean}, {"y_sd", t.y_sd}, {"r_shift", t.r_shift}};
}

McmcConfig sub_config(const RunConfig& c, std::uint64_t stream) {
  McmcConfig m = c.mcmc;
  m.seed = mix_seed(c.mcmc.seed, stream);
  return m;
}

bool fuzzy(const RunConfig& c) { return c.design == "fuzzy"; }

// Sharp: Y on (r, t) with the master seed. Fuzzy: Y on (r, assignment)
// and T on (r, assignment) with independent sub-seeds.
PosteriorDraws fit_outcome(const RunConfig& c, const Dataset& d) {
  if (fuzzy(c)) return run_chain(outcome_regression(d, Covariate::Assignment), c.hyper, sub_config(c, 1));
  return run_chain(outcome_regression(d, Covariate::Treatment), c.hyper, c.mcmc);
}

PosteriorDraws fit_treatment(const RunConfig& c, const Dataset& d) {
  return run_chain(treatment_regression(d), c.hyper, sub_config(c, 2));
}

std::string trace_csv(const PosteriorDraws& draws) {
  const auto traces = parameter_traces(draws);
  std::string out = "draw,chain";
  for (const auto& t : traces) out += "," + t.name;
  out += '\n';
  for (std::size_t d = 0; d < draws.size(); ++d) {
    out += std::to_string(d) + ',' + std::to_string(draws.draws[d].chain);
    for (const auto& t : traces) out += ',' + format_double(t.values[d]);
    out += '\n';
  }
  return out;
}

json convergence_json(const PosteriorDraws& draws) {
  const auto traces = parameter_traces(draws);
  json j;
  j["draws"] = draws.size();
  j["target_half_width"] = 0.01;
  j["batches"] = kDefaultBatches;
  if (draws.size() < 2 * kDefaultBatches) {
    j["status"] = "insufficient draws for batch means";
    return j;
  }
  const auto rep = convergence_report(traces);
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"name", e.name}, {"mean", e.ci.mean}, {"half_width", e.ci.half_width},
                       {"within_target", e.within_target}});
  }
  j["scalars"] = entries;
  j["all_within_target"] = rep.all_within_target();
  return j;
}

// Functional given on the data scale, re-expressed on the model scale.
FunctionalH to_model(const FunctionalH& h, const Transform& t) {
  FunctionalH m = h;
  switch (h.kind) {
    case FunctionalH::Kind::CdfAt:
    case FunctionalH::Kind::DensityAt:
    case FunctionalH::Kind::SurvivalAt:
    case FunctionalH::Kind::IndicatorLeq:
      m.arg = t.y_to_model(h.arg);
      break;
    default:
      break;
  }
  return m;
}

// Multiplier taking a model-scale effect of H to the data scale.
double data_scale_factor(const FunctionalH& h, const Transform& t) {
  switch (h.kind) {
    case FunctionalH::Kind::Mean:
    case FunctionalH::Kind::QuantileAt:
      return t.y_sd;
    case FunctionalH::Kind::Variance:
      return t.y_sd * t.y_sd;
    case FunctionalH::Kind::DensityAt:
      return 1.0 / t.y_sd;
    default:
      return 1.0;
  }
}

json estimate_json(const CausalEffectEstimate& e, const FunctionalH& h_data, const Transform& t) {
  const auto [lo, hi] = e.band95();
  const double k = data_scale_factor(h_data, t);
  json j;
  j["functional"] = h_data.label();
  j["estimator"] = to_string(e.design);
  j["point"] = e.point;
  j["posterior_variance"] = e.posterior_variance;
  j["band95"] = {lo, hi};
  j["band_excludes_zero"] = e.band_excludes_zero();
  j["data_scale"] = {{"point", k * e.point}, {"posterior_variance", k * k * e.posterior_variance},
                     {"band95", {k * lo, k * hi}}};
  if (e.design != Design::Sharp) {
    j["denominator"] = {{"mean", e.denominator.mean}, {"variance", e.denominator.variance}};
  }
  if (e.design == Design::FuzzyPosteriorRatio) j["excluded_pairs"] = e.excluded_pairs;
  return j;
}

std::vector<double> model_grid(const RunConfig& c, const Prepared& p) {
  return default_grid(p.model.y, c.grid_points);
}

std::vector<Query> model_queries(const RunConfig& c, const Prepared& p) {
  std::vector<Query> qs = c.queries;
  if (qs.empty()) qs = {{c.cutoff, 0}, {c.cutoff, 1}};
  for (auto& q : qs) q.r = p.transform.r_to_model(q.r);
  return qs;
}

std::string pp_csv(const std::vector<PpRow>& rows, const Transform& t) {
  std::string out = "y,cdf_control,cdf_treated,control_lower,control_upper,treated_lower,treated_upper,overlap\n";
  for (const auto& r : rows) {
    out += format_double(t.y_from_model(r.y)) + ',' + format_double(r.cdf_control) + ',' +
           format_double(r.cdf_treated) + ',' + format_double(r.control_lower) + ',' +
           format_double(r.control_upper) + ',' + format_double(r.treated_lower) + ',' +
           format_double(r.treated_upper) + ',' + (r.overlap ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

Artifacts cmd_fit(const RunConfig& c) {
  const Prepared p = prepare(c);
  Artifacts files;
  const auto n_chains = static_cast<std::uint32_t>(c.mcmc.chains);
  json report;
  report["transform"] = transform_json(p.transform);
  report["design"] = c.design;
  const PosteriorDraws dy = fit_outcome(c, p.model);
  files["chain_outcome.bin"] = encode_chain(dy, n_chains);
  files["trace_outcome.csv"] = trace_csv(dy);
  report["outcome"] = convergence_json(dy);
  if (fuzzy(c)) {
    const PosteriorDraws dt = fit_treatment(c, p.model);
    files["chain_treatment.bin"] = encode_chain(dt, n_chains);
    files["trace_treatment.csv"] = trace_csv(dt);
    report["treatment"] = convergence_json(dt);
  }
  files["convergence.json"] = dump_json(report);
  return files;
}

Artifacts cmd_predict(const RunConfig& c) {
  const Prepared p = prepare(c);
  const PosteriorDraws dy = fit_outcome(c, p.model);
  const auto grid = model_grid(c, p);
  const auto& t = p.transform;
  std::string csv = "r,t,y,density,cdf,cdf_lower,cdf_upper\n";
  json summary;
  summary["transform"] = transform_json(t);
  summary["draws"] = dy.size();
  json qs = json::array();
  for (const auto& q : model_queries(c, p)) {
    PredictiveQuery pq{q.r, q.t, grid, c.quantiles};
    const PredictiveSummary s = predict(dy, pq);
    const double r_data = q.r + t.r_shift;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      csv += format_double(r_data) + ',' + std::to_string(q.t) + ',' + format_double(t.y_from_model(grid[g])) + ',' +
             format_double(s.density[g] / t.y_sd) + ',' + format_double(s.cdf[g]);
      if (s.cdf_band) {
        csv += ',' + format_double(s.cdf_band->lower[g]) + ',' + format_double(s.cdf_band->upper[g]);
      } else {
        csv += ",,";
      }
      csv += '\n';
    }
    json quant = json::array();
    for (const auto& [u, y] : s.quantiles) quant.push_back({{"u", u}, {"y", t.y_from_model(y)}});
    qs.push_back({{"r", r_data},
                  {"t", q.t},
                  {"mean", t.y_from_model(s.mean)},
                  {"variance", s.variance * t.y_sd * t.y_sd},
                  {"quantiles", quant}});
  }
  summary["queries"] = qs;
  return {{"predictive.csv", csv}, {"predictive.json", dump_json(summary)}};
}

Artifacts cmd_effect(const RunConfig& c) {
  const Prepared p = prepare(c);
  const auto& t = p.transform;
  const double r0 = p.model.cutoff;
  Artifacts files;
  json report;
  report["design"] = c.design;
  report["cutoff"] = c.cutoff;
  report["transform"] = transform_json(t);

  const PosteriorDraws dy = fit_outcome(c, p.model);
  std::optional<PosteriorDraws> dt;
  std::optional<Adherence> den;
  report["draws"] = {{"outcome", dy.size()}};
  if (fuzzy(c)) {
    dt = fit_treatment(c, p.model);
    report["draws"]["treatment"] = dt->size();
    den = adherence_denominator(*dt, r0);
    report["denominator"] = {{"mean", den->mean}, {"variance", den->variance}};
  }

  json effects = json::array();
  json quantile_effects = json::array();
  std::string sens = "functional,denominator,point,posterior_variance,lower,upper\n";
  for (const auto& text : c.functionals) {
    const FunctionalH h_data = FunctionalH::parse(text);
    const FunctionalH h = to_model(h_data, t);
    const CausalEffectEstimate sharp = sharp_effect(dy, r0, h);
    if (!den) {
      effects.push_back(estimate_json(sharp, h_data, t));
    } else {
      effects.push_back(estimate_json(fuzzy_effect_first_order(sharp, *den), h_data, t));
      if (c.second_order) effects.push_back(estimate_json(fuzzy_effect_second_order(sharp, *den), h_data, t));
      if (c.posterior_ratio) effects.push_back(estimate_json(fuzzy_effect_posterior_ratio(dy, *dt, r0, h), h_data, t));
      json itt = estimate_json(sharp, h_data, t);
      itt["estimator"] = "intention-to-treat";
      effects.push_back(itt);
    }
    if (h.kind == FunctionalH::Kind::QuantileAt) {
      const QuantileEffect q = quantile_effect(dy, r0, h.arg, den);
      json jq = estimate_json(q.estimate, h_data, t);
      jq["u"] = q.u;
      jq["quantile_control"] = t.y_from_model(q.quantile_control);
      jq["quantile_treated"] = t.y_from_model(q.quantile_treated);
      jq["evaluation_y"] = t.y_from_model(q.evaluation_y);
      jq["significant"] = q.significant;
      quantile_effects.push_back(jq);
    }
    if (c.sensitivity) {
      const auto sweep = adherence_sensitivity(sharp, *c.sensitivity);
      const double k = data_scale_factor(h_data, t);
      for (std::size_t s = 0; s < sweep.size(); ++s) {
        const auto [lo, hi] = sweep[s].band95();
        sens += h_data.label() + ',' + format_double((*c.sensitivity)[s]) + ',' + format_double(k * sweep[s].point) +
                ',' + format_double(k * k * sweep[s].posterior_variance) + ',' + format_double(k * lo) + ',' +
                format_double(k * hi) + '\n';
      }
    }
  }
  report["effects"] = effects;
  report["quantile_effects"] = quantile_effects;
  files["effect.json"] = dump_json(report);
  if (c.sensitivity) files["sensitivity.csv"] = sens;
  if (dy.size() >= kMinDrawsForBand) files["pp.csv"] = pp_csv(pp_plot_data(dy, r0, model_grid(c, p)), t);
  return files;
}

Artifacts cmd_diagnose(const RunConfig& c) {
  const Prepared p = prepare(c);
  const PosteriorDraws dy = fit_outcome(c, p.model);
  const RegressionData rd = outcome_regression(p.model, fuzzy(c) ? Covariate::Assignment : Covariate::Treatment);
  const FitReport rep = residuals(dy, rd);
  const auto& t = p.transform;
  std::string csv = "i,y,r,t,predictive_mean,predictive_variance,z,outlier\n";
  double zmin = std::numeric_limits<double>::infinity();
  double zmax = -zmin;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    csv += std::to_string(i + 1) + ',' + format_double(p.raw.y[i]) + ',' + format_double(p.raw.r[i]) + ',' +
           std::to_string(p.raw.t[i]) + ',' + format_double(t.y_from_model(rep.predictive_mean[i])) + ',' +
           format_double(rep.predictive_variance[i] * t.y_sd * t.y_sd) + ',' +
           (rep.degenerate[i] ? std::string("") : format_double(rep.z[i])) + ',' + (rep.outlier[i] ? "1" : "0") +
           '\n';
    if (!rep.degenerate[i]) {
      zmin = std::min(zmin, rep.z[i]);
      zmax = std::max(zmax, rep.z[i]);
    }
  }
  json j;
  j["transform"] = transform_json(t);
  j["observations"] = rd.size();
  j["outliers"] = rep.outlier_count;
  j["degenerate"] = rep.degenerate_count;
  j["outlier_threshold"] = kOutlierThreshold;
  j["z_min"] = zmin;
  j["z_max"] = zmax;
  j["r_squared"] = rep.r_squared ? json(*rep.r_squared) : json("undefined (constant outcome)");
  j["r_squared_definition"] = "1 - sum (y - E_n)^2 / sum (y - mean y)^2";
  j["convergence"] = convergence_json(dy);
  return {{"fit_report.json", dump_json(j)}, {"residuals.csv", csv}};
}

Artifacts cmd_simulate(const RunConfig& c) {
  const Simulation sim = simulate(c.sim);
  const GroundTruth& g = sim.truth;
  json truth;
  truth["mean_effect"] = g.mean_effect;
  truth["variance_effect"] = g.variance_effect;
  truth["compliance_jump"] = g.compliance_jump;
  json q = json::array();
  for (const auto& [u, e] : g.quantile_effects) q.push_back({{"u", u}, {"effect", e}});
  truth["quantile_effects"] = q;
  truth["outcome_at_cutoff"] = {
      {"control", {{"mean", g.outcome_mean(0)}, {"variance", g.outcome_variance(0)}}},
      {"treated", {{"mean", g.outcome_mean(1)}, {"variance", g.outcome_variance(1)}}}};
  return {{"data.csv", dataset_csv(sim.data)}, {"truth.json", dump_json(truth)}};
}

Artifacts run_command(const RunConfig& c) {
  c.validate();
  Artifacts files;
  if (c.command == "fit") {
    files = cmd_fit(c);
  } else if (c.command == "predict") {
    files = cmd_predict(c);
  } else if (c.command == "effect") {
    files = cmd_effect(c);
  } else if (c.command == "diagnose") {
    files = cmd_diagnose(c);
  } else if (c.command == "simulate") {
    files = cmd_simulate(c);
  } else {
    throw DomainError("unknown command '" + c.command + "'");
  }
  files["manifest.json"] = dump_json(manifest(c));
  return files;
}

void commit_artifacts(const std::filesystem::path& out, const Artifacts& files) {
  namespace fs = std::filesystem;
  fs::create_directories(out);
  const fs::path staging = out / ".staging";
  std::error_code ec;
  fs::remove_all(staging, ec);
  fs::create_directories(staging);
  try {
    for (const auto& [name, content] : files) write_file_atomic(staging / name, content);
    for (const auto& [name, content] : files) fs::rename(staging / name, out / name);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  fs::remove_all(staging, ec);
}

int execute(const RunConfig& c) {
  try {
    const Artifacts files = run_command(c);
    commit_artifacts(c.out, files);
    for (const auto& [name, content] : files) std::cout << (c.out / name).string() << '\n';
    return 0;
  } catch (const DataError& e) {
    std::cerr << "bnprdd " << c.command << ": " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "bnprdd " << c.command << ": " << e.what() << '\n';
    return 2;
  } catch (const ZeroDenominatorError& e) {
    std::cerr << "bnprdd " << c.command << ": " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "bnprdd " << c.command << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bnprdd::cli
