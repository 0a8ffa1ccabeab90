#include "rabi/trace.hpp"

#include <cmath>

#include "rabi/errors.hpp"

namespace rabi {

namespace {
constexpr double kGridSlack = 1e-9;
}

TimeGrid TimeGrid::span(double t0, double t_max, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt", "time step must be positive");
  if (!(t_max >= t0)) throw ConfigError("t_max", "must not precede t0");
  const auto steps = static_cast<std::size_t>(std::floor((t_max - t0) / dt + kGridSlack));
  return {t0, dt, steps + 1};
}

void validate_grid(const TimeGrid& grid) {
  if (grid.n == 0) throw ConfigError("times", "time grid is empty");
  if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) throw ConfigError("times.dt", "time step must be positive");
  if (!std::isfinite(grid.t0)) throw ConfigError("times.t0", "must be finite");
}

void OscillationTrace::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("trace.dt", "time step must be positive");
  if (values.size() < kMinTraceSamples) throw ConfigError("trace", "needs at least 8 samples");
}

OscillationTrace OscillationTrace::window(double t_min, double t_max) const {
  const double slack = kGridSlack * dt;
  OscillationTrace out;
  out.dt = dt;
  bool first = true;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double t = time(k);
    if (t < t_min - slack || t > t_max + slack) continue;
    if (first) {
      out.t0 = t;
      first = false;
    }
    out.values.push_back(values[k]);
  }
  return out;
}

}  // namespace rabi
