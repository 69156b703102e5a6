#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "bnprdd/io.hpp"

namespace {

using bnprdd::cli::RunConfig;

bool on_off(const std::string& v) { return v == "on"; }

void add_data_options(CLI::App* sub, RunConfig& c, std::string& t_col, std::string& std_y, std::string& center_r) {
  sub->add_option("--data", c.data, "Dataset CSV with a header row")->required();
  sub->add_option("--y-col", c.y_col, "Outcome column")->capture_default_str();
  sub->add_option("--r-col", c.r_col, "Assignment variable column")->capture_default_str();
  sub->add_option("--t-col", t_col, "Treatment column; 'none' derives t = 1{r >= cutoff}")->capture_default_str();
  sub->add_option("--cutoff", c.cutoff, "Cutoff r0")->required();
  sub->add_option("--standardize-y", std_y, "z-score the outcome (sample sd)")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--center-r", center_r, "Shift r so the cutoff is 0")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  sub->add_option("--design", c.design, "sharp or fuzzy")
      ->check(CLI::IsMember({"sharp", "fuzzy"}))
      ->capture_default_str();
  sub->add_option("--iterations", c.mcmc.total_iterations, "Total MCMC iterations")->capture_default_str();
  sub->add_option("--burn-in", c.mcmc.burn_in, "Discarded leading iterations")->capture_default_str();
  sub->add_option("--thin", c.mcmc.thin, "Keep every thin-th iteration")->capture_default_str();
  sub->add_option("--seed", c.mcmc.seed, "Master seed")->capture_default_str();
  sub->add_option("--chains", c.mcmc.chains, "Independent chains, pooled")->capture_default_str();
  sub->add_option("--mu0", c.hyper.mu0)->capture_default_str();
  sub->add_option("--sigma0-sq", c.hyper.sigma0_sq)->capture_default_str();
  sub->add_option("--a0", c.hyper.a0)->capture_default_str();
  sub->add_option("--b0", c.hyper.b0)->capture_default_str();
  sub->add_option("--v", c.hyper.v, "Prior variance of beta and lambda")->capture_default_str();
  sub->add_option("--b-sigma-mu", c.hyper.b_sigma_mu, "Upper bound of sigma_mu")->capture_default_str();
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian nonparametric regression discontinuity analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", bnprdd::cli::kToolVersion);

  RunConfig c;
  std::string t_col = "t";
  std::string std_y = "on";
  std::string center_r = "on";
  std::string sensitivity;
  std::vector<std::string> queries;
  std::string manifest_path;
  std::string replay_out;

  auto* fit = app.add_subcommand("fit", "Run the sampler; write chain files and a convergence report");
  auto* predict = app.add_subcommand("predict", "Posterior predictive density, CDF and quantiles");
  auto* effect = app.add_subcommand("effect", "Causal effects at the cutoff");
  auto* diagnose = app.add_subcommand("diagnose", "Standardized residuals and R-squared");
  for (auto* sub : {fit, predict, effect, diagnose}) add_data_options(sub, c, t_col, std_y, center_r);

  predict->add_option("--query", queries, "r,t pair (repeatable); default: both sides of the cutoff");
  predict->add_option("--quantile", c.quantiles, "Quantile levels")->delimiter(',');
  for (auto* sub : {predict, effect}) {
    sub->add_option("--grid-points", c.grid_points, "Points in the outcome grid")->capture_default_str();
  }
  effect->add_option("--functional", c.functionals,
                     "mean, variance, quantile=u, cdf=y, density[=y], survival=y (repeatable)");
  effect->add_option("--sensitivity", sensitivity, "Fixed adherence denominators, e.g. \"1,.9,.8\"");
  effect->add_flag("--second-order", c.second_order, "Also report the second-order fuzzy estimate");
  effect->add_flag("--posterior-ratio", c.posterior_ratio, "Also report the posterior mean of the ratio");

  auto* sim = app.add_subcommand("simulate", "Synthetic RDD data with known effects");
  std::string noise = "normal";
  double noise_sd = 1.0;
  double adherence = 1.0;
  double r_min = -1.0;
  double r_max = 1.0;
  std::string m0 = "0";
  sim->add_option("--n", c.sim.n)->capture_default_str();
  sim->add_option("--cutoff", c.sim.r0)->capture_default_str();
  sim->add_option("--r-min", r_min)->capture_default_str();
  sim->add_option("--r-max", r_max)->capture_default_str();
  sim->add_option("--m0", m0, "Polynomial coefficients of (r - cutoff)")->capture_default_str();
  sim->add_option("--delta-mean", c.sim.delta_mean)->capture_default_str();
  sim->add_option("--delta-logvar", c.sim.delta_logvar)->capture_default_str();
  sim->add_option("--noise", noise)->check(CLI::IsMember({"normal", "mixture"}))->capture_default_str();
  sim->add_option("--noise-sd", noise_sd, "Normal noise sd")->capture_default_str();
  sim->add_option("--adherence", adherence, "Compliance probability on both sides")->capture_default_str();
  sim->add_option("--seed", c.sim.seed)->capture_default_str();
  sim->add_option("--out", c.out)->capture_default_str();

  auto* replay = app.add_subcommand("replay", "Re-run a previous invocation from its manifest");
  replay->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
  replay->add_option("--out", replay_out, "Override the output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*replay) {
      const auto j = bnprdd::cli::json::parse(bnprdd::read_file(manifest_path));
      RunConfig r = bnprdd::cli::config_from_json(j.at("config"));
      if (!replay_out.empty()) r.out = replay_out;
      return bnprdd::cli::execute(r);
    }
    c.command = app.get_subcommands().front()->get_name();
    if (*sim) {
      c.sim.r_dist = bnprdd::UniformR{r_min, r_max};
      c.sim.m0 = bnprdd::cli::parse_list(m0);
      if (noise == "mixture") {
        c.sim.noise = bnprdd::MixtureNoise{};
      } else {
        c.sim.noise = bnprdd::NormalNoise{noise_sd};
      }
      c.sim.adherence_above = c.sim.adherence_below = adherence;
      return bnprdd::cli::execute(c);
    }
    if (t_col == "none") {
      c.t_col.reset();
    } else {
      c.t_col = t_col;
    }
    c.standardize_y = on_off(std_y);
    c.center_r = on_off(center_r);
    if (!sensitivity.empty()) c.sensitivity = bnprdd::cli::parse_list(sensitivity);
    for (const auto& q : queries) {
      const auto v = bnprdd::cli::parse_list(q);
      if (v.size() != 2) throw std::invalid_argument("--query expects r,t");
      c.queries.push_back({v[0], static_cast<int>(v[1])});
    }
    return bnprdd::cli::execute(c);
  } catch (const std::exception& e) {
    std::cerr << "bnprdd: " << e.what() << '\n';
    return 2;
  }
}
