#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rabi/distribution.hpp"

namespace rabi {

/// Scalar 1-D field profile in kHz as a function of one coordinate in mm.
/// Either a polynomial sum c_k x^k or linear interpolation between nodes
/// (held constant beyond the end nodes).
class Profile {
 public:
  static Profile constant(double value_khz);
  static Profile polynomial(std::vector<double> coefficients);
  static Profile piecewise_linear(std::vector<std::pair<double, double>> nodes);

  double operator()(double x) const;

 private:
  std::vector<double> coeffs_{0.0};
  std::vector<std::pair<double, double>> nodes_;
};

/// Field of the cell as B0 + sign * B1 where B0 = (b0x(x), b0y(y), b0z(z)) and
/// B1 = (b1x(x), b1y(y), b_set + b1z(z)); every value is in kHz.
struct FieldGridModel {
  double x_min = -8.0, x_max = 8.0;
  double y_min = -8.0, y_max = 8.0;
  double z_min = -20.0, z_max = 20.0;
  double spacing = 0.5;  ///< mm
  Profile b0x, b0y, b0z;
  Profile b1x, b1y, b1z;  ///< b1z is the deviation from b_set
  double b_set_khz = 16000.0;
  int current_sign = 1;

  void validate() const;
  /// |B_tot| - b_set at a point, in kHz.
  double deviation(double x, double y, double z) const;
  /// Sample coordinates along one axis: min, min + spacing, ... <= max.
  std::vector<double> axis(double lo, double hi) const;
};

enum class BeamProfile { flat_top, gaussian };

/// Pump/probe weighting around the z axis. The Gaussian option has
/// intensity exp(-2 r^2 / w^2) with w = diameter / 2.
struct ProbeBeam {
  BeamProfile profile = BeamProfile::flat_top;
  double diameter = 12.0;  ///< mm

  void validate() const;
  double weight(double x, double y) const;
};

struct FieldHistogram {
  std::vector<double> bin_centers_khz;
  std::vector<double> weights;  ///< sums to 1
  double bin_width_khz = 0.0;
  // From the weighted grid points, not the bins.
  double mean_khz = 0.0;
  double std_khz = 0.0;
  double skewness = 0.0;
  double fraction_below = 0.0;  ///< weight strictly below the mean
  double fraction_above = 0.0;
};

/// Beam-weighted histogram of |B_tot| - b_set over the grid. The bins span
/// the observed range; a zero range yields a single bin.
FieldHistogram field_magnitude_histogram(const FieldGridModel& model, const ProbeBeam& beam, std::size_t n_bins);

struct HistogramMoments {
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
};

/// Moments computed from the binned histogram alone.
HistogramMoments histogram_moments(const FieldHistogram& hist);

/// Field deviations to detuning shifts: shift = -2 pi * deviation_kHz, since a
/// stronger field raises the transition frequency and lowers the detuning.
/// With recenter the shifts are taken relative to their weighted mean, so the
/// central detuning refers to the ensemble's mean resonance.
DetuningDistribution histogram_to_distribution(const FieldHistogram& hist, bool recenter = true);

/// Illustrative profiles with mostly axial variation: with current_sign = +1
/// the distribution is nearly symmetric, with -1 it has a long tail toward
/// weaker fields. Not digitised from any measurement.
FieldGridModel fig8_like_preset(int current_sign);

}  // namespace rabi
