#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rabi {

/// Uniform sample times t0 + k*dt, k = 0..n-1 (ms).
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.008;
  std::size_t n = 0;

  double at(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  double t_end() const noexcept { return n == 0 ? t0 : at(n - 1); }

  /// Grid on [t0, t_max] inclusive (up to rounding) with step dt.
  static TimeGrid span(double t0, double t_max, double dt);
};

inline constexpr std::size_t kMinTraceSamples = 8;

/// Uniformly sampled population signal.
struct OscillationTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t k) const noexcept { return t0 + static_cast<double>(k) * dt; }
  TimeGrid grid() const noexcept { return {t0, dt, values.size()}; }

  /// Throws ConfigError unless dt > 0 and there are at least 8 samples.
  void validate() const;

  /// Samples with t_min <= t <= t_max (small rounding slack), as a new trace.
  OscillationTrace window(double t_min, double t_max) const;
};

/// Throws ConfigError if the grid is empty or dt is not positive.
void validate_grid(const TimeGrid& grid);

}  // namespace rabi
