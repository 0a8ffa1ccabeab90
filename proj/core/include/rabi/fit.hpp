#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "rabi/trace.hpp"

namespace rabi {

enum class DecayLaw {
  exponential,  ///< e^{-gamma t}
  gaussian,     ///< e^{-gamma^2 t^2 / 2}
};

struct SingleFitOptions {
  DecayLaw decay = DecayLaw::exponential;
  bool drift = true;  ///< fit the B t term; B is pinned to 0 otherwise
  int max_iterations = 200;
  std::size_t frequency_starts = 5;
};

/// A e^{-gamma t} cos(omega t + phi) + B t + C, t in ms from the trace origin.
struct SingleFreqFit {
  double A = 0.0;
  double gamma = 0.0;
  double omega = 0.0;  ///< rad/ms, >= 0
  double phi = 0.0;    ///< (-pi, pi]
  double B = 0.0;
  double C = 0.0;
  double r_squared = 0.0;
  std::array<double, 6> ci95{};  ///< half-widths in the order above
  DecayLaw decay = DecayLaw::exponential;
  bool degenerate = false;  ///< flat window: A = 0 and infinite intervals
  int iterations = 0;

  double operator()(double t) const;
};

inline constexpr std::size_t kMinFitSamples = 30;

/// Least-squares fit over t_min <= t <= t_max. Starting frequencies come from
/// the strongest spectral peaks of the window; amplitudes, phase and baseline
/// from a linear solve at each start. Throws FitError if every start fails to
/// converge and ConfigError for windows with fewer than 30 samples.
SingleFreqFit fit_single_frequency(const OscillationTrace& trace, double t_min, double t_max,
                                   const SingleFitOptions& options = {});

struct TwoFitOptions {
  bool fit_gamma_a = false;
  double gamma_a = 0.0;  ///< value used when gamma_a is not fitted
  int max_iterations = 200;
  double uncertainty_threshold = 0.25;  ///< full CI width relative to the value
};

/// A e^{-gamma_a^2 t^2/2} cos(omega0 t + phi_a)
///   + B e^{-gamma_b^2 t^2/2} cos(omega_bar t + phi_b) + offset.
struct TwoFreqFit {
  double omega0 = 0.0;
  double A = 0.0;
  double phi_a = 0.0;
  double gamma_a = 0.0;
  double B_amp = 0.0;
  double omega_bar = 0.0;
  double phi_b = 0.0;
  double gamma_b = 0.0;
  double offset = 0.0;
  double r_squared = 0.0;
  std::array<double, 8> ci95{};  ///< half-widths in the order A .. offset above
  double fraction_A = 0.0;       ///< |A| / (|A| + |B|)
  bool uncertain = false;        ///< some of A, B, omega_bar, gamma_b have CI width > threshold
  bool indistinguishable = false;  ///< omega_bar within its CI of omega0
  bool degenerate = false;
  int iterations = 0;

  double operator()(double t) const;
};

/// End of the default two-frequency window, 10 bare periods.
double two_frequency_window(double omega0);

/// Seeds come from a coarse grid over (omega_bar, gamma_b) with the linear
/// parameters solved exactly at each cell.
TwoFreqFit fit_two_frequency(const OscillationTrace& trace, double omega0, double t_min, double t_max,
                             const TwoFitOptions& options = {});

struct FrequencyTrackPoint {
  double t_center = 0.0;
  double omega = 0.0;
  double ci95 = 0.0;
  bool ok = false;
  std::string error;  ///< set when the window fit failed
};

/// Single-frequency fits (no drift term) on windows of window_length ms
/// advanced by hop ms. Windows shorter than three fitted periods or whose
/// fit fails are reported as gaps.
std::vector<FrequencyTrackPoint> sliding_window_frequency(const OscillationTrace& trace, double window_length,
                                                          double hop, DecayLaw decay = DecayLaw::exponential);

}  // namespace rabi
