#include "rabi/core_model.hpp"

#include <cmath>

#include "rabi/errors.hpp"
#include "rabi/units.hpp"

namespace rabi {

DriveParams DriveParams::from_khz(double omega0_khz, double delta_khz) {
  DriveParams d{khz_to_angular(omega0_khz), khz_to_angular(delta_khz)};
  d.validate();
  return d;
}

void DriveParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("drive.omega0", "bare Rabi frequency must be positive");
  if (!std::isfinite(delta)) throw ConfigError("drive.delta", "detuning must be finite");
}

double generalized_rabi(const DriveParams& drive, double local_shift) noexcept {
  return std::hypot(drive.omega0, drive.delta + local_shift);
}

double lorentzian_factor(double omega0, double delta) noexcept {
  const double x = delta / omega0;
  return 1.0 / (1.0 + x * x);
}

double p1_two_level(const DriveParams& drive, double local_shift, double t) noexcept {
  const double rabi = generalized_rabi(drive, local_shift);
  const double s = std::sin(0.5 * rabi * t);
  const double ratio = drive.omega0 / rabi;
  return ratio * ratio * s * s;
}

double small_sigma_decay_rate(const DriveParams& drive, double sigma) noexcept {
  return sigma * std::abs(drive.delta) / generalized_rabi(drive);
}

OscillationTrace analytic_small_sigma_signal(const DriveParams& drive, double sigma, const TimeGrid& times) {
  drive.validate();
  validate_grid(times);
  if (!(sigma >= 0.0)) throw ConfigError("sigma", "must be non-negative");

  const double rabi = generalized_rabi(drive);
  const double amp = 0.5 * lorentzian_factor(drive.omega0, drive.delta);
  const double gamma = small_sigma_decay_rate(drive, sigma);

  OscillationTrace out{times.t0, times.dt, {}};
  out.values.reserve(times.n);
  for (std::size_t k = 0; k < times.n; ++k) {
    const double t = times.at(k);
    const double g = gamma * t;
    out.values.push_back(amp * (1.0 - std::cos(rabi * t) * std::exp(-0.5 * g * g)));
  }
  return out;
}

}  // namespace rabi
