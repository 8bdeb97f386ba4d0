// Serial reference paths against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "ansnis/config.hpp"
#include "ansnis/experiment.hpp"
#include "ansnis/quadrature.hpp"

using namespace ansnis;

namespace {

ProblemSpec example1() {
  return {DiagGaussian({0.0, 0.0}, {0.012, 0.06}), DiagGaussian({0.0, 0.0}, {0.12, 0.06})};
}

Exec exec_arg(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void BM_QuadratureMu(benchmark::State& state) {
  const auto spec = example1();
  const QuadSpec q{static_cast<std::size_t>(state.range(1)), 8.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(quadrature_mu(spec, q, exec_arg(state)));
  }
}
BENCHMARK(BM_QuadratureMu)
    ->ArgNames({"parallel", "points"})
    ->ArgsProduct({{0, 1}, {401, 1601}})
    ->Unit(benchmark::kMillisecond);

void BM_GridDump(benchmark::State& state) {
  const auto spec = example1();
  const auto mu = closed_form_mu(spec);
  const auto bounds = grid_bounds(spec, 6.0);
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_dump(spec, mu, bounds, n, kDefaultLogFloor, exec_arg(state)));
  }
}
BENCHMARK(BM_GridDump)
    ->ArgNames({"parallel", "resolution"})
    ->ArgsProduct({{0, 1}, {101, 501}})
    ->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.name = "bench";
  cfg.spec = example1();
  cfg.methods = {Method::ansnis, Method::snis_uisopt, Method::snis_target};
  cfg.budgets = {5000};
  cfg.replications = 4;
  cfg.base_seed = 7;
  cfg.burn_in_mult = 100;
  const RunOptions options{static_cast<std::size_t>(state.range(0)), {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(cfg, options));
  }
}
BENCHMARK(BM_RunExperiment)->ArgName("workers")->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
