#include <benchmark/benchmark.h>

#include <cmath>

#include "rabi/spectrum.hpp"
#include "rabi/units.hpp"

using namespace rabi;

static void BM_Spectrum(benchmark::State& state) {
  OscillationTrace tr;
  tr.dt = 1.0 / static_cast<double>(state.range(0));
  for (std::int64_t k = 0; k < state.range(0); ++k)
    tr.values.push_back(std::cos(khz_to_angular(9.0) * static_cast<double>(k) * tr.dt));
  for (auto _ : state) benchmark::DoNotOptimize(fft_spectrum(tr));
}
BENCHMARK(BM_Spectrum)->Arg(125)->Arg(1000)->Arg(8000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
