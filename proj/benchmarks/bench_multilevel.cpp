#include <benchmark/benchmark.h>

#include "rabi/multilevel.hpp"
#include "rabi/units.hpp"

using namespace rabi;

static void BM_Dopri5(benchmark::State& state) {
  const auto sys = build_f2_system(DriveParams::from_khz(9.0, 3.0), 0.0, kDefaultQuadraticShift, khz_to_angular(1.0));
  const auto rho0 = DensityMatrix::pure(5, 0);
  const auto grid = TimeGrid::span(0.0, 1.0, 0.008);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(sys, rho0, grid));
}
BENCHMARK(BM_Dopri5)->Unit(benchmark::kMillisecond);

static void BM_ExactPropagator(benchmark::State& state) {
  const auto sys = build_f2_system(DriveParams::from_khz(9.0, 3.0), 0.0, kDefaultQuadraticShift, khz_to_angular(1.0));
  const auto rho0 = DensityMatrix::pure(5, 0);
  const auto grid = TimeGrid::span(0.0, 1.0, 0.008);
  for (auto _ : state) benchmark::DoNotOptimize(level_population_exact(sys, rho0, grid, 1));
}
BENCHMARK(BM_ExactPropagator)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
