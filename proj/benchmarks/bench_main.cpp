#include <benchmark/benchmark.h>

#include <vector>

#include "bnprdd/causal.hpp"
#include "bnprdd/datasim.hpp"
#include "bnprdd/model.hpp"
#include "bnprdd/predictive.hpp"
#include "bnprdd/sampler.hpp"

using namespace bnprdd;

namespace {

Simulation bench_data(std::size_t n) {
  SimSpec spec;
  spec.n = n;
  spec.delta_mean = 1.0;
  spec.seed = 42;
  return simulate(spec);
}

PosteriorDraws bench_draws(std::size_t retained) {
  const Simulation sim = bench_data(500);
  McmcConfig cfg;
  cfg.burn_in = 500;
  cfg.total_iterations = cfg.burn_in + retained;
  cfg.thin = 1;
  return run_chain(outcome_regression(sim.data, Covariate::Treatment), {}, cfg);
}

}  // namespace

static void BM_Weight(benchmark::State& state) {
  double e = 0.3;
  for (auto _ : state) {
    double s = 0.0;
    for (int j = -10; j <= 10; ++j) s += weight(j, e, 1.7);
    benchmark::DoNotOptimize(s);
    e += 1e-9;
  }
  state.SetItemsProcessed(state.iterations() * 21);
}
BENCHMARK(BM_Weight);

static void BM_ActiveWindow(benchmark::State& state) {
  std::vector<double> etas(static_cast<std::size_t>(state.range(0)));
  std::vector<double> sigmas(etas.size());
  for (std::size_t i = 0; i < etas.size(); ++i) {
    etas[i] = -2.0 + 4.0 * static_cast<double>(i) / static_cast<double>(etas.size());
    sigmas[i] = 0.5 + static_cast<double>(i % 7) / 7.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(active_window(etas, sigmas));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ActiveWindow)->Arg(500)->Arg(5000);

static void BM_GibbsSweep(benchmark::State& state) {
  const Simulation sim = bench_data(static_cast<std::size_t>(state.range(0)));
  GibbsSampler sampler(outcome_regression(sim.data, Covariate::Treatment), {});
  RandomStream rng(7);
  ParameterState s = sampler.initial_state(rng);
  for (int k = 0; k < 200; ++k) sampler.sweep(s, rng);
  for (auto _ : state) sampler.sweep(s, rng);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GibbsSweep)->Arg(500)->Arg(2000)->Unit(benchmark::kMicrosecond);

static void BM_BinarySweep(benchmark::State& state) {
  SimSpec spec;
  spec.n = static_cast<std::size_t>(state.range(0));
  spec.adherence_above = spec.adherence_below = 0.85;
  const Simulation sim = simulate(spec);
  GibbsSampler sampler(treatment_regression(sim.data), {});
  RandomStream rng(9);
  ParameterState s = sampler.initial_state(rng);
  for (int k = 0; k < 200; ++k) sampler.sweep(s, rng);
  for (auto _ : state) sampler.sweep(s, rng);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinarySweep)->Arg(500)->Unit(benchmark::kMicrosecond);

static void BM_Predict(benchmark::State& state) {
  const PosteriorDraws draws = bench_draws(static_cast<std::size_t>(state.range(0)));
  PredictiveQuery q;
  q.t = 1;
  for (int k = 0; k < 512; ++k) q.grid.push_back(-5.0 + 10.0 * k / 511.0);
  q.quantiles = {0.05, 0.5, 0.95};
  for (auto _ : state) benchmark::DoNotOptimize(predict(draws, q));
}
BENCHMARK(BM_Predict)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_QuantileEffect(benchmark::State& state) {
  const PosteriorDraws draws = bench_draws(2000);
  for (auto _ : state) benchmark::DoNotOptimize(quantile_effect(draws, 0.0, 0.25));
}
BENCHMARK(BM_QuantileEffect)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
