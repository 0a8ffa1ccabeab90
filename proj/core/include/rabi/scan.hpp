#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rabi/ensemble.hpp"
#include "rabi/fit.hpp"
#include "rabi/spectrum.hpp"

namespace rabi {

enum class ScanAnalysis { single, two, fft };

struct ScanSettings {
  EnsembleConfig base;  ///< drive.delta is replaced by each scanned value
  TimeGrid times{0.0, 0.008, 126};
  ScanAnalysis analysis = ScanAnalysis::single;
  double window_min = 0.01;  ///< ms, single-frequency window
  double window_max = 0.6;
  SingleFitOptions single;
  TwoFitOptions two;
  /// End of the two-frequency window; 0 means 10 bare periods.
  double two_window_max = 0.0;
  SpectrumOptions spectrum;
  std::size_t threads = 1;
};

struct ScanRow {
  double delta = 0.0;              ///< rad/ms
  double omega_generalized = 0.0;  ///< sqrt(omega0^2 + delta^2)
  double omega_fit = 0.0;          ///< single: omega; two: omega_bar; fft: strongest peak
  double omega_ci = 0.0;
  double amplitude = 0.0;  ///< single: A; two: A + B; fft: strongest peak height
  double amplitude_ci = 0.0;
  double gamma = 0.0;  ///< single-frequency decay rate
  double gamma_ci = 0.0;
  double tau = 0.0;  ///< 1 / gamma
  double fraction_A = 0.0;
  double gamma_b = 0.0;
  double gamma_b_ci = 0.0;
  double r_squared = 0.0;
  bool uncertain = false;
  std::vector<SpectralPeak> peaks;
  std::string error;  ///< non-empty if this row failed

  bool ok() const noexcept { return error.empty(); }
};

/// Generates the ensemble trace at every detuning and analyses it. Rows come
/// back in input order; failures are recorded per row and never abort the
/// scan. Throws ConfigError only for an empty or non-finite detuning list.
std::vector<ScanRow> scan_detuning(const ScanSettings& settings, const std::vector<double>& detunings);

/// Analysis of an already generated trace, as done for each scan row.
ScanRow analyse_trace(const ScanSettings& settings, double delta, const OscillationTrace& trace);

}  // namespace rabi
