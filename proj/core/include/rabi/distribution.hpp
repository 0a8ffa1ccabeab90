#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

namespace rabi {

enum class DistributionKind { gaussian, skewed_gaussian, empirical };

/// One histogram bin of local detuning shifts (rad/ms) and its weight.
struct EmpiricalBin {
  double shift = 0.0;
  double weight = 0.0;
};

/// Location/scale/shape of a skew-normal with mean 0 and standard deviation sigma.
struct SkewNormalParams {
  double location = 0.0;
  double scale = 0.0;
  double shape = 0.0;
};

SkewNormalParams skew_normal_params(double sigma, double skew);

/// Skew-normal density (2/w) phi((x-xi)/w) Phi(alpha (x-xi)/w) with (xi, w)
/// chosen so the distribution has mean 0 and standard deviation sigma. The
/// shape alpha is the configured skew; skew = 0 is the ordinary Gaussian.
double skewed_gaussian_density(double sigma, double skew, double x);

/// Distribution of local detuning shifts delta - Delta. Parametric kinds are
/// mean-centred, so Delta is the ensemble mean detuning.
///
/// `skew` is the skew-normal shape in detuning space. A field distribution
/// with a long tail toward weaker fields maps to positive skew here, since a
/// weaker field means a lower transition frequency and a larger local detuning.
struct DetuningDistribution {
  DistributionKind kind = DistributionKind::gaussian;
  double sigma = 0.0;  ///< rad/ms
  double skew = 0.0;
  std::vector<EmpiricalBin> empirical;

  static DetuningDistribution gaussian(double sigma);
  static DetuningDistribution skewed_gaussian(double sigma, double skew);
  /// Weights are normalised to 1; zero-weight bins are dropped.
  static DetuningDistribution from_bins(std::vector<EmpiricalBin> bins);

  void validate() const;
  bool is_parametric() const noexcept { return kind != DistributionKind::empirical; }
  /// True for sigma == 0 parametric distributions (all atoms share Delta).
  bool is_degenerate() const noexcept { return is_parametric() && sigma == 0.0; }

  /// Density of a parametric distribution at the given shift.
  double density(double shift) const;
  double mean() const;
  double standard_deviation() const;
  /// Third standardized moment.
  double skewness() const;
};

/// Two-column text file: shift_kHz, weight. '#' starts a comment line.
/// Columns may be separated by commas or whitespace.
DetuningDistribution load_empirical_distribution(const std::filesystem::path& path);

/// Draws detuning shifts. Skew-normal variates use the
/// delta|U0| + sqrt(1-delta^2) U1 construction; histograms use the inverse CDF.
class DetuningSampler {
 public:
  explicit DetuningSampler(const DetuningDistribution& dist);

  double operator()(std::mt19937_64& rng);

 private:
  DistributionKind kind_;
  SkewNormalParams params_{};
  double shape_delta_ = 0.0;
  std::vector<double> cdf_;
  std::vector<double> shifts_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace rabi
