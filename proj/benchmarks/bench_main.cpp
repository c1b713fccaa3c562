#include "starspec/analytic.hpp"
#include "starspec/orbits.hpp"
#include "starspec/spectrum.hpp"

#include <benchmark/benchmark.h>

using namespace starspec;

static void BM_SolveSpectrum(benchmark::State& state) {
  const auto g = build_graph(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spectrum(g, 100.0));
}
BENCHMARK(BM_SolveSpectrum)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BesselRatio(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_ratio(x));
    x = x > 30.0 ? 0.0 : x + 0.37;
  }
}
BENCHMARK(BM_BesselRatio);

static void BM_F2(benchmark::State& state) {
  const Truncation t;
  for (auto _ : state) benchmark::DoNotOptimize(f2(0.7, 0.3, t));
}
BENCHMARK(BM_F2)->Unit(benchmark::kMicrosecond);

static void BM_QFormula(benchmark::State& state) {
  const OrbitClass cls{{3, 2, 2, 1}, {2, 2, 1, 1}};
  for (auto _ : state) benchmark::DoNotOptimize(q_formula(cls));
}
BENCHMARK(BM_QFormula)->Unit(benchmark::kMicrosecond);

static void BM_TabulateKernel(benchmark::State& state) {
  Truncation t;
  t.quad_points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tabulate_kernel(t));
}
BENCHMARK(BM_TabulateKernel)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
