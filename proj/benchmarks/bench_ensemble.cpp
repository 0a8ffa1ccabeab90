#include <benchmark/benchmark.h>

#include "rabi/ensemble.hpp"
#include "rabi/units.hpp"

using namespace rabi;

namespace {

EnsembleConfig skewed(double sigma_khz) {
  EnsembleConfig c;
  c.drive = DriveParams::from_khz(9.0, -6.0);
  c.distribution = DetuningDistribution::skewed_gaussian(khz_to_angular(sigma_khz), 0.3);
  return c;
}

}  // namespace

static void BM_QuadratureAnalytic(benchmark::State& state) {
  const auto cfg = skewed(8.0);
  const auto grid = TimeGrid::span(0.0, 1.0, 0.008);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_signal(cfg, grid, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_QuadratureAnalytic)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_QuadratureMultilevel(benchmark::State& state) {
  auto cfg = skewed(8.0);
  cfg.atom_model = MultilevelModel{kDefaultQuadraticShift, khz_to_angular(1.0)};
  cfg.quadrature.nodes = 201;
  cfg.quadrature.halfwidth_sigma = 6.0;
  const auto grid = TimeGrid::span(0.0, 0.6, 0.008);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_signal(cfg, grid, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_QuadratureMultilevel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_MonteCarlo(benchmark::State& state) {
  const auto cfg = skewed(8.0);
  const auto grid = TimeGrid::span(0.0, 1.0, 0.008);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_signal(cfg, grid, 100000, 12345, 4));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
