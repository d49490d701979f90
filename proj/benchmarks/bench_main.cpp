#include <benchmark/benchmark.h>

#include "dualwave/dual_map.hpp"
#include "dualwave/functionals.hpp"
#include "dualwave/scalings.hpp"
#include "dualwave/solver.hpp"

using namespace dualwave;

static void BM_FEval(benchmark::State& state) {
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(f_eval(t));
}
BENCHMARK(BM_FEval)->Arg(1)->Arg(1000)->Arg(100000000);

static void BM_EnergyState(benchmark::State& state) {
  const auto g = make_grid(2, 20.0, static_cast<int>(state.range(0)));
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
  const auto nl = Nonlinearity::power(7.0);
  for (auto _ : state) benchmark::DoNotOptimize(energy_state(v, nl, state.range(1) != 0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyState)->ArgsProduct({{501, 2001, 8001}, {0, 1}});

static void BM_FindTv(benchmark::State& state) {
  const auto g = make_grid(2, 20.0, 2001);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 10.0);
  const auto nl = Nonlinearity::power(7.0);
  for (auto _ : state) benchmark::DoNotOptimize(find_tv(v, nl));
}
BENCHMARK(BM_FindTv);

static void BM_Stretch(benchmark::State& state) {
  const auto g = make_grid(3, 24.0, 4001);
  const auto v = mass_project(sample_gaussian(g, 1.0, 1.0), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(stretch(v, 2.0));
}
BENCHMARK(BM_Stretch);

static void BM_MinimizeSigma(benchmark::State& state) {
  SolveConfig cfg;
  cfg.N = 2;
  cfg.M = static_cast<int>(state.range(0));
  cfg.restarts = 1;
  const auto nl = Nonlinearity::power(7.0);
  for (auto _ : state) benchmark::DoNotOptimize(minimize_sigma(4.0, nl, cfg));
}
BENCHMARK(BM_MinimizeSigma)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
