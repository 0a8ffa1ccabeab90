#include "rabi/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

// Only fftw_execute is thread-safe; the planner is not.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

void remove_linear_trend(std::vector<double>& y, double dt) {
  const auto n = static_cast<double>(y.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double t = static_cast<double>(k) * dt;
    st += t;
    sy += y[k];
    stt += t * t;
    sty += t * y[k];
  }
  const double den = n * stt - st * st;
  const double slope = den != 0.0 ? (n * sty - st * sy) / den : 0.0;
  const double icpt = (sy - slope * st) / n;
  for (std::size_t k = 0; k < y.size(); ++k) y[k] -= icpt + slope * static_cast<double>(k) * dt;
}

}  // namespace

std::vector<double> peak_prominences(const std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> prom(n, 0.0);
  if (n < 3) return prom;

  // Nearest strictly higher sample on each side (n when there is none).
  std::vector<std::size_t> left(n, n), right(n, n), stack;
  for (std::size_t i = 0; i < n; ++i) {
    while (!stack.empty() && y[stack.back()] <= y[i]) stack.pop_back();
    if (!stack.empty()) left[i] = stack.back();
    stack.push_back(i);
  }
  stack.clear();
  for (std::size_t i = n; i-- > 0;) {
    while (!stack.empty() && y[stack.back()] <= y[i]) stack.pop_back();
    if (!stack.empty()) right[i] = stack.back();
    stack.push_back(i);
  }

  // Sparse table for range minima.
  std::vector<std::vector<double>> table{y};
  for (std::size_t w = 1; 2 * w <= n; w *= 2) {
    const auto& prev = table.back();
    std::vector<double> next(n - 2 * w + 1);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = std::min(prev[i], prev[i + w]);
    table.push_back(std::move(next));
  }
  auto range_min = [&](std::size_t lo, std::size_t hi) {
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= hi - lo + 1) ++level;
    return std::min(table[level][lo], table[level][hi + 1 - (std::size_t{1} << level)]);
  };

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    const double left_min = range_min(left[i] == n ? 0 : left[i] + 1, i);
    const double right_min = range_min(i, right[i] == n ? n - 1 : right[i] - 1);
    prom[i] = y[i] - std::max(left_min, right_min);
  }
  return prom;
}

SpectrumResult fft_spectrum(const OscillationTrace& trace, const SpectrumOptions& options) {
  if (trace.size() < kMinSpectrumSamples) throw ConfigError("trace", "need at least 16 samples for a spectrum");
  if (!(trace.dt > 0.0)) throw ConfigError("trace.dt", "must be positive");
  if (options.zero_pad < 1 || options.zero_pad > 4) throw ConfigError("zero_pad", "must be between 1 and 4");
  if (!(options.relative_prominence >= 0.0)) throw ConfigError("relative_prominence", "must be >= 0");

  const std::size_t n = trace.size();
  std::vector<double> y = trace.values;
  if (options.detrend) remove_linear_trend(y, trace.dt);

  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double w = 1.0;
    if (options.window == WindowFunction::hann)
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1)));
    y[k] *= w;
    wsum += w;
  }

  const std::size_t m = n * options.zero_pad;
  y.resize(m, 0.0);
  std::vector<std::complex<double>> out(m / 2 + 1);
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(m), y.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE));
  }
  if (!plan) throw Error("FFTW could not create a plan");
  fftw_execute(plan.get());

  SpectrumResult r;
  const double df = 1.0 / (static_cast<double>(m) * trace.dt);  // ms^-1 == kHz
  r.freqs.resize(out.size());
  r.power.resize(out.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    r.freqs[k] = static_cast<double>(k) * df;
    r.power[k] = 2.0 * std::abs(out[k]) / wsum;
  }

  const double global_max = *std::max_element(r.power.begin() + 1, r.power.end());
  const auto prom = peak_prominences(r.power);
  for (std::size_t k = 1; k + 1 < r.power.size(); ++k) {
    if (prom[k] > 0.0 && prom[k] >= options.relative_prominence * global_max)
      r.peaks.push_back({r.freqs[k], r.power[k], prom[k]});
  }
  std::stable_sort(r.peaks.begin(), r.peaks.end(), [](const auto& a, const auto& b) { return a.height > b.height; });
  return r;
}

}  // namespace rabi
