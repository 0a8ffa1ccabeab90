#pragma once

#include "rabi/trace.hpp"

namespace rabi {

/// Drive parameters, angular units (rad/ms).
struct DriveParams {
  double omega0 = 0.0;  ///< bare Rabi frequency, > 0
  double delta = 0.0;   ///< central detuning; red < 0, blue > 0

  static DriveParams from_khz(double omega0_khz, double delta_khz);
  /// Throws ConfigError unless omega0 > 0 and both values are finite.
  void validate() const;
};

/// sqrt(omega0^2 + delta^2) with delta = drive.delta + local_shift.
double generalized_rabi(const DriveParams& drive, double local_shift = 0.0) noexcept;

/// Population of |1> for a two-level atom starting in |2>, local detuning
/// drive.delta + local_shift:
///   (omega0 / Omega_R)^2 sin^2(Omega_R t / 2).
double p1_two_level(const DriveParams& drive, double local_shift, double t) noexcept;

/// Lorentzian amplitude factor 1 / (1 + delta^2 / omega0^2).
double lorentzian_factor(double omega0, double delta) noexcept;

/// Small-inhomogeneity closed form of the ensemble signal,
///   (1/2) L(Delta) [1 - cos(Omega_R t) exp(-sigma^2 Delta^2 t^2 / (2 Omega_R^2))],
/// i.e. an oscillation at Omega_R with Gaussian decay rate sigma |Delta| / Omega_R.
/// Only meaningful for sigma << omega0; nothing enforces that.
OscillationTrace analytic_small_sigma_signal(const DriveParams& drive, double sigma, const TimeGrid& times);

/// Gaussian decay rate of the closed form above.
double small_sigma_decay_rate(const DriveParams& drive, double sigma) noexcept;

}  // namespace rabi
