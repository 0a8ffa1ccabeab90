#include "rabi/fieldmap.hpp"

#include <algorithm>
#include <cmath>

#include "rabi/errors.hpp"
#include "rabi/units.hpp"

namespace rabi {

Profile Profile::constant(double value_khz) { return polynomial({value_khz}); }

Profile Profile::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  for (double c : coefficients)
    if (!std::isfinite(c)) throw ConfigError("profile.coefficients", "must be finite");
  Profile p;
  p.coeffs_ = std::move(coefficients);
  return p;
}

Profile Profile::piecewise_linear(std::vector<std::pair<double, double>> nodes) {
  if (nodes.empty()) throw ConfigError("profile.nodes", "need at least one node");
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!std::isfinite(nodes[i].first) || !std::isfinite(nodes[i].second))
      throw ConfigError("profile.nodes", "must be finite");
    if (i > 0 && nodes[i].first == nodes[i - 1].first) throw ConfigError("profile.nodes", "positions must be distinct");
  }
  Profile p;
  p.coeffs_.clear();
  p.nodes_ = std::move(nodes);
  return p;
}

double Profile::operator()(double x) const {
  if (nodes_.empty()) {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }
  if (x <= nodes_.front().first) return nodes_.front().second;
  if (x >= nodes_.back().first) return nodes_.back().second;
  const auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), x,
                                   [](double v, const std::pair<double, double>& n) { return v < n.first; });
  const auto lo = hi - 1;
  const double f = (x - lo->first) / (hi->first - lo->first);
  return lo->second + f * (hi->second - lo->second);
}

void FieldGridModel::validate() const {
  if (!(spacing > 0.0)) throw ConfigError("fieldmap.spacing", "must be positive");
  if (!(x_max >= x_min) || !(y_max >= y_min) || !(z_max >= z_min))
    throw ConfigError("fieldmap.bounds", "must be ordered (min <= max)");
  if (!(b_set_khz > 0.0)) throw ConfigError("fieldmap.b_set_khz", "must be positive");
  if (current_sign != 1 && current_sign != -1) throw ConfigError("fieldmap.current_sign", "must be +1 or -1");
}

double FieldGridModel::deviation(double x, double y, double z) const {
  const double s = current_sign;
  const double bx = b0x(x) + s * b1x(x);
  const double by = b0y(y) + s * b1y(y);
  const double bz = b0z(z) + s * (b_set_khz + b1z(z));
  return std::sqrt(bx * bx + by * by + bz * bz) - b_set_khz;
}

std::vector<double> FieldGridModel::axis(double lo, double hi) const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * spacing);
  return out;
}

void ProbeBeam::validate() const {
  if (!(diameter > 0.0) || !std::isfinite(diameter)) throw ConfigError("beam.diameter", "must be positive");
}

double ProbeBeam::weight(double x, double y) const {
  const double r2 = x * x + y * y;
  const double radius = 0.5 * diameter;
  if (profile == BeamProfile::flat_top) return r2 <= radius * radius * (1.0 + 1e-12) ? 1.0 : 0.0;
  return std::exp(-2.0 * r2 / (radius * radius));
}

FieldHistogram field_magnitude_histogram(const FieldGridModel& model, const ProbeBeam& beam, std::size_t n_bins) {
  model.validate();
  beam.validate();
  if (n_bins == 0) throw ConfigError("n_bins", "must be positive");

  std::vector<double> dev, w;
  const auto xs = model.axis(model.x_min, model.x_max);
  const auto ys = model.axis(model.y_min, model.y_max);
  const auto zs = model.axis(model.z_min, model.z_max);
  for (double x : xs)
    for (double y : ys) {
      const double wt = beam.weight(x, y);
      if (wt <= 0.0) continue;
      for (double z : zs) {
        dev.push_back(model.deviation(x, y, z));
        w.push_back(wt);
      }
    }
  if (dev.empty()) throw ConfigError("beam.diameter", "beam misses every grid point");

  double total = 0.0;
  for (double v : w) total += v;
  for (double& v : w) v /= total;

  const auto [lo_it, hi_it] = std::minmax_element(dev.begin(), dev.end());
  const double lo = *lo_it, hi = *hi_it;

  FieldHistogram h;
  for (std::size_t i = 0; i < dev.size(); ++i) h.mean_khz += w[i] * dev[i];
  double m2 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    const double d = dev[i] - h.mean_khz;
    m2 += w[i] * d * d;
    m3 += w[i] * d * d * d;
    if (d < 0.0) h.fraction_below += w[i];
  }
  h.fraction_above = 1.0 - h.fraction_below;
  if (!(hi > lo)) m2 = m3 = 0.0;
  h.std_khz = std::sqrt(m2);
  h.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  if (!(hi > lo)) n_bins = 1;
  h.bin_width_khz = n_bins == 1 ? 0.0 : (hi - lo) / static_cast<double>(n_bins);
  h.weights.assign(n_bins, 0.0);
  h.bin_centers_khz.resize(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b)
    h.bin_centers_khz[b] = n_bins == 1 ? 0.5 * (lo + hi) : lo + (static_cast<double>(b) + 0.5) * h.bin_width_khz;
  for (std::size_t i = 0; i < dev.size(); ++i) {
    std::size_t b = 0;
    if (n_bins > 1) b = std::min(n_bins - 1, static_cast<std::size_t>((dev[i] - lo) / h.bin_width_khz));
    h.weights[b] += w[i];
  }
  return h;
}

HistogramMoments histogram_moments(const FieldHistogram& hist) {
  HistogramMoments m;
  double total = 0.0;
  for (std::size_t i = 0; i < hist.weights.size(); ++i) {
    total += hist.weights[i];
    m.mean += hist.weights[i] * hist.bin_centers_khz[i];
  }
  if (total <= 0.0) return m;
  m.mean /= total;
  double m2 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < hist.weights.size(); ++i) {
    const double d = hist.bin_centers_khz[i] - m.mean;
    m2 += hist.weights[i] * d * d / total;
    m3 += hist.weights[i] * d * d * d / total;
  }
  m.std_dev = std::sqrt(m2);
  m.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  return m;
}

DetuningDistribution histogram_to_distribution(const FieldHistogram& hist, bool recenter) {
  if (hist.weights.empty()) throw ConfigError("histogram", "is empty");
  const double centre = recenter ? histogram_moments(hist).mean : 0.0;
  std::vector<EmpiricalBin> bins;
  bins.reserve(hist.weights.size());
  for (std::size_t i = 0; i < hist.weights.size(); ++i)
    bins.push_back({-khz_to_angular(hist.bin_centers_khz[i] - centre), hist.weights[i]});
  return DetuningDistribution::from_bins(std::move(bins));
}

FieldGridModel fig8_like_preset(int current_sign) {
  FieldGridModel m;
  m.current_sign = current_sign;
  // Radial parts: small and even in the transverse coordinate.
  m.b0x = Profile::polynomial({0.0, 0.0, 0.3 / 64.0});
  m.b0y = Profile::polynomial({0.0, 0.0, 0.3 / 64.0});
  m.b1x = Profile::polynomial({0.0, 0.0, -0.2 / 64.0});
  m.b1y = Profile::polynomial({0.0, 0.0, -0.2 / 64.0});
  // Axial parts, with u = z / 20 mm: b0z = 5 u^2 + 2 u, b1z - b_set = -4.5 u^2.
  m.b0z = Profile::polynomial({0.0, 2.0 / 20.0, 5.0 / 400.0});
  m.b1z = Profile::polynomial({0.0, 0.0, -4.5 / 400.0});
  m.validate();
  return m;
}

}  // namespace rabi
