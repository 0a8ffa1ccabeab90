#include <benchmark/benchmark.h>

#include "rabi/ensemble.hpp"
#include "rabi/fit.hpp"
#include "rabi/units.hpp"

using namespace rabi;

namespace {

OscillationTrace trace(double sigma_over_omega0, const TimeGrid& grid) {
  EnsembleConfig c;
  c.drive = DriveParams::from_khz(9.0, 9.0);
  c.distribution = DetuningDistribution::gaussian(sigma_over_omega0 * c.drive.omega0);
  return ensemble_signal(c, grid);
}

}  // namespace

static void BM_SingleFit(benchmark::State& state) {
  const auto tr = trace(0.5, TimeGrid::span(0.0, 1.0, 0.008));
  for (auto _ : state) benchmark::DoNotOptimize(fit_single_frequency(tr, 0.01, 0.6));
}
BENCHMARK(BM_SingleFit)->Unit(benchmark::kMillisecond);

static void BM_TwoFit(benchmark::State& state) {
  const double om = khz_to_angular(9.0);
  const auto grid = TimeGrid::span(0.0, two_frequency_window(om), 0.002);
  const auto tr = trace(1.0, grid);
  for (auto _ : state) benchmark::DoNotOptimize(fit_two_frequency(tr, om, 0.0, grid.t_end()));
}
BENCHMARK(BM_TwoFit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
