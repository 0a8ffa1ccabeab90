#include "rabi/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rabi/errors.hpp"
#include "rabi/units.hpp"

namespace rabi {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double shape_delta(double alpha) { return alpha / std::sqrt(1.0 + alpha * alpha); }

}  // namespace

SkewNormalParams skew_normal_params(double sigma, double skew) {
  const double d = shape_delta(skew);
  const double b = std::sqrt(2.0 / std::numbers::pi);
  const double scale = sigma / std::sqrt(1.0 - b * b * d * d);
  return {-scale * d * b, scale, skew};
}

double skewed_gaussian_density(double sigma, double skew, double x) {
  if (!(sigma > 0.0)) throw ConfigError("sigma", "must be positive");
  const auto p = skew_normal_params(sigma, skew);
  const double z = (x - p.location) / p.scale;
  return 2.0 / p.scale * normal_pdf(z) * normal_cdf(p.shape * z);
}

DetuningDistribution DetuningDistribution::gaussian(double sigma) {
  DetuningDistribution d;
  d.kind = DistributionKind::gaussian;
  d.sigma = sigma;
  d.validate();
  return d;
}

DetuningDistribution DetuningDistribution::skewed_gaussian(double sigma, double skew) {
  DetuningDistribution d;
  d.kind = DistributionKind::skewed_gaussian;
  d.sigma = sigma;
  d.skew = skew;
  d.validate();
  return d;
}

DetuningDistribution DetuningDistribution::from_bins(std::vector<EmpiricalBin> bins) {
  std::erase_if(bins, [](const EmpiricalBin& b) { return b.weight == 0.0; });
  for (const auto& b : bins) {
    if (!(b.weight > 0.0) || !std::isfinite(b.weight) || !std::isfinite(b.shift)) {
      throw ConfigError("distribution.empirical", "weights must be finite and non-negative");
    }
  }
  if (bins.empty()) throw ConfigError("distribution.empirical", "histogram has no mass");
  std::sort(bins.begin(), bins.end(), [](const auto& a, const auto& b) { return a.shift < b.shift; });
  const double total = std::accumulate(bins.begin(), bins.end(), 0.0,
                                       [](double s, const EmpiricalBin& b) { return s + b.weight; });
  for (auto& b : bins) b.weight /= total;

  DetuningDistribution d;
  d.kind = DistributionKind::empirical;
  d.empirical = std::move(bins);
  d.validate();
  return d;
}

void DetuningDistribution::validate() const {
  if (is_parametric()) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ConfigError("distribution.sigma", "must be non-negative");
    if (!std::isfinite(skew)) throw ConfigError("distribution.skew", "must be finite");
    return;
  }
  if (empirical.empty()) throw ConfigError("distribution.empirical", "histogram is empty");
  double total = 0.0;
  for (const auto& b : empirical) {
    if (!(b.weight >= 0.0)) throw ConfigError("distribution.empirical", "negative weight");
    total += b.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("distribution.empirical", "weights must sum to 1");
}

double DetuningDistribution::density(double shift) const {
  if (!is_parametric()) throw ConfigError("distribution", "empirical histograms have no density");
  if (sigma == 0.0) throw ConfigError("distribution.sigma", "degenerate distribution has no density");
  return skewed_gaussian_density(sigma, kind == DistributionKind::gaussian ? 0.0 : skew, shift);
}

double DetuningDistribution::mean() const {
  if (is_parametric()) return 0.0;
  double m = 0.0;
  for (const auto& b : empirical) m += b.weight * b.shift;
  return m;
}

double DetuningDistribution::standard_deviation() const {
  if (is_parametric()) return sigma;
  const double m = mean();
  double v = 0.0;
  for (const auto& b : empirical) v += b.weight * (b.shift - m) * (b.shift - m);
  return std::sqrt(v);
}

double DetuningDistribution::skewness() const {
  if (kind == DistributionKind::gaussian || is_degenerate()) return 0.0;
  if (kind == DistributionKind::skewed_gaussian) {
    const double d = shape_delta(skew);
    const double mu = d * std::sqrt(2.0 / std::numbers::pi);
    return 0.5 * (4.0 - std::numbers::pi) * std::pow(mu, 3) / std::pow(1.0 - mu * mu, 1.5);
  }
  const double m = mean();
  const double s = standard_deviation();
  if (s == 0.0) return 0.0;
  double m3 = 0.0;
  for (const auto& b : empirical) m3 += b.weight * std::pow(b.shift - m, 3);
  return m3 / (s * s * s);
}

DetuningDistribution load_empirical_distribution(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open distribution file");
  std::vector<EmpiricalBin> bins;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double shift_khz = 0.0;
    double weight = 0.0;
    if (!(fields >> shift_khz >> weight)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no), "expected 'shift_kHz, weight'");
    }
    if (weight < 0.0) throw ConfigError(path.string() + ":" + std::to_string(line_no), "negative weight");
    bins.push_back({khz_to_angular(shift_khz), weight});
  }
  return DetuningDistribution::from_bins(std::move(bins));
}

DetuningSampler::DetuningSampler(const DetuningDistribution& dist) : kind_(dist.kind) {
  dist.validate();
  if (dist.is_parametric()) {
    params_ = skew_normal_params(dist.sigma, kind_ == DistributionKind::gaussian ? 0.0 : dist.skew);
    shape_delta_ = shape_delta(params_.shape);
    return;
  }
  double acc = 0.0;
  for (const auto& b : dist.empirical) {
    acc += b.weight;
    cdf_.push_back(acc);
    shifts_.push_back(b.shift);
  }
  cdf_.back() = 1.0;
}

double DetuningSampler::operator()(std::mt19937_64& rng) {
  if (kind_ == DistributionKind::empirical) {
    const double u = uniform_(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    return shifts_[idx];
  }
  if (params_.scale == 0.0) return 0.0;
  const double u0 = normal_(rng);
  const double u1 = normal_(rng);
  const double z = shape_delta_ * std::abs(u0) + std::sqrt(1.0 - shape_delta_ * shape_delta_) * u1;
  return params_.location + params_.scale * z;
}

}  // namespace rabi
