#include "config.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "bnprdd/error.hpp"
#include "bnprdd/io.hpp"

namespace bnprdd::cli {

namespace {

json sim_to_json(const SimSpec& s) {
  json j;
  j["n"] = s.n;
  j["r0"] = s.r0;
  if (const auto* u = std::get_if<UniformR>(&s.r_dist)) {
    j["r_dist"] = {{"family", "uniform"}, {"a", u->a}, {"b", u->b}};
  } else {
    const auto& nr = std::get<NormalR>(s.r_dist);
    j["r_dist"] = {{"family", "normal"}, {"mean", nr.mean}, {"sd", nr.sd}};
  }
  j["m0"] = s.m0;
  j["delta_mean"] = s.delta_mean;
  j["delta_logvar"] = s.delta_logvar;
  if (const auto* m = std::get_if<MixtureNoise>(&s.noise)) {
    j["noise"] = {{"family", "mixture"}, {"weight", m->weight}, {"mean1", m->mean1}, {"sd1", m->sd1},
                  {"mean2", m->mean2}, {"sd2", m->sd2}};
  } else {
    j["noise"] = {{"family", "normal"}, {"sd", std::get<NormalNoise>(s.noise).sd}};
  }
  j["adherence_above"] = s.adherence_above;
  j["adherence_below"] = s.adherence_below;
  j["seed"] = s.seed;
  return j;
}

SimSpec sim_from_json(const json& j) {
  SimSpec s;
  s.n = j.at("n").get<std::size_t>();
  s.r0 = j.at("r0").get<double>();
  const json& rd = j.at("r_dist");
  if (rd.at("family") == "uniform") {
    s.r_dist = UniformR{rd.at("a").get<double>(), rd.at("b").get<double>()};
  } else {
    s.r_dist = NormalR{rd.at("mean").get<double>(), rd.at("sd").get<double>()};
  }
  s.m0 = j.at("m0").get<std::vector<double>>();
  s.delta_mean = j.at("delta_mean").get<double>();
  s.delta_logvar = j.at("delta_logvar").get<double>();
  const json& nz = j.at("noise");
  if (nz.at("family") == "mixture") {
    s.noise = MixtureNoise{nz.at("weight").get<double>(), nz.at("mean1").get<double>(), nz.at("sd1").get<double>(),
                           nz.at("mean2").get<double>(), nz.at("sd2").get<double>()};
  } else {
    s.noise = NormalNoise{nz.at("sd").get<double>()};
  }
  s.adherence_above = j.at("adherence_above").get<double>();
  s.adherence_below = j.at("adherence_below").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (command == "simulate") {
    sim.validate();
    return;
  }
  if (data.empty()) throw DomainError("--data is required");
  if (!std::isfinite(cutoff)) throw DomainError("--cutoff must be finite");
  if (design != "sharp" && design != "fuzzy") throw DomainError("--design must be sharp or fuzzy");
  if (design == "fuzzy" && !t_col) throw DomainError("a fuzzy design needs a treatment column");
  hyper.validate();
  mcmc.validate();
  for (const auto& f : functionals) FunctionalH::parse(f);
  for (double u : quantiles) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile levels must lie in (0,1)");
  }
  for (const auto& q : queries) {
    if (q.t != 0 && q.t != 1) throw DomainError("query t must be 0 or 1");
  }
  if (grid_points < 16) throw DomainError("--grid-points must be at least 16");
  if (sensitivity) {
    for (double d : *sensitivity) {
      if (d == 0.0 || !std::isfinite(d)) throw DomainError("--sensitivity entries must be nonzero");
    }
  }
}

json to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (c.command == "simulate") {
    j["simulation"] = sim_to_json(c.sim);
    j["out"] = c.out.generic_string();
    return j;
  }
  j["data"] = c.data.generic_string();
  j["columns"] = {{"y", c.y_col}, {"r", c.r_col}, {"t", c.t_col ? json(*c.t_col) : json(nullptr)}};
  j["cutoff"] = c.cutoff;
  j["standardize_y"] = c.standardize_y;
  j["center_r"] = c.center_r;
  j["hyperparams"] = {{"mu0", c.hyper.mu0}, {"sigma0_sq", c.hyper.sigma0_sq}, {"a0", c.hyper.a0},
                      {"b0", c.hyper.b0},   {"v", c.hyper.v},                 {"b_sigma_mu", c.hyper.b_sigma_mu}};
  j["mcmc"] = {{"iterations", c.mcmc.total_iterations}, {"burn_in", c.mcmc.burn_in}, {"thin", c.mcmc.thin},
               {"seed", c.mcmc.seed},                   {"chains", c.mcmc.chains}};
  j["design"] = c.design;
  j["functionals"] = c.functionals;
  j["quantiles"] = c.quantiles;
  json q = json::array();
  for (const auto& x : c.queries) q.push_back({{"r", x.r}, {"t", x.t}});
  j["queries"] = q;
  j["grid_points"] = c.grid_points;
  j["sensitivity"] = c.sensitivity ? json(*c.sensitivity) : json(nullptr);
  j["second_order"] = c.second_order;
  j["posterior_ratio"] = c.posterior_ratio;
  j["out"] = c.out.generic_string();
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  c.out = j.at("out").get<std::string>();
  if (c.command == "simulate") {
    c.sim = sim_from_json(j.at("simulation"));
    return c;
  }
  c.data = j.at("data").get<std::string>();
  const json& cols = j.at("columns");
  c.y_col = cols.at("y").get<std::string>();
  c.r_col = cols.at("r").get<std::string>();
  if (cols.at("t").is_null()) {
    c.t_col.reset();
  } else {
    c.t_col = cols.at("t").get<std::string>();
  }
  c.cutoff = j.at("cutoff").get<double>();
  c.standardize_y = j.at("standardize_y").get<bool>();
  c.center_r = j.at("center_r").get<bool>();
  const json& h = j.at("hyperparams");
  c.hyper.mu0 = h.at("mu0").get<double>();
  c.hyper.sigma0_sq = h.at("sigma0_sq").get<double>();
  c.hyper.a0 = h.at("a0").get<double>();
  c.hyper.b0 = h.at("b0").get<double>();
  c.hyper.v = h.at("v").get<double>();
  c.hyper.b_sigma_mu = h.at("b_sigma_mu").get<double>();
  const json& m = j.at("mcmc");
  c.mcmc.total_iterations = m.at("iterations").get<std::size_t>();
  c.mcmc.burn_in = m.at("burn_in").get<std::size_t>();
  c.mcmc.thin = m.at("thin").get<std::size_t>();
  c.mcmc.seed = m.at("seed").get<std::uint64_t>();
  c.mcmc.chains = m.at("chains").get<std::size_t>();
  c.design = j.at("design").get<std::string>();
  c.functionals = j.at("functionals").get<std::vector<std::string>>();
  c.quantiles = j.at("quantiles").get<std::vector<double>>();
  for (const auto& q : j.at("queries")) c.queries.push_back({q.at("r").get<double>(), q.at("t").get<int>()});
  c.grid_points = j.at("grid_points").get<std::size_t>();
  if (!j.at("sensitivity").is_null()) c.sensitivity = j.at("sensitivity").get<std::vector<double>>();
  c.second_order = j.at("second_order").get<bool>();
  c.posterior_ratio = j.at("posterior_ratio").get<bool>();
  return c;
}

json manifest(const RunConfig& c) {
  json j;
  j["tool"] = "bnprdd";
  j["version"] = kToolVersion;
  j["chain_file_version"] = kChainFileVersion;
  j["config"] = to_json(c);
  return j;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string cell = text.substr(start, comma - start);
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    while (!cell.empty() && cell.back() == ' ') cell.pop_back();
    if (cell.empty()) throw DomainError("empty entry in list '" + text + "'");
    if (cell.front() == '+') cell.erase(cell.begin());
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw DomainError("not a number: '" + cell + "' in list '" + text + "'");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

}  // namespace bnprdd::cli
