#include "rabi/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rabi/errors.hpp"
#include "rabi/parallel.hpp"
#include "rabi/quadrature.hpp"

namespace rabi {

namespace {

constexpr std::size_t kChunk = 64;
constexpr std::size_t kSampleBlock = 4096;
constexpr double kSupportTolerance = 1e-6;

struct Node {
  double shift;
  double weight;
};

std::vector<Node> build_nodes(const EnsembleConfig& config, double t_max) {
  const auto& dist = config.distribution;
  if (dist.kind == DistributionKind::empirical) {
    std::vector<Node> nodes;
    nodes.reserve(dist.empirical.size());
    for (const auto& b : dist.empirical) nodes.push_back({b.shift, b.weight});
    return nodes;
  }
  if (dist.sigma == 0.0) return {{0.0, 1.0}};

  const double half = config.quadrature.halfwidth_sigma * dist.sigma;
  const std::size_t order = config.quadrature.nodes != 0
                                ? config.quadrature.nodes
                                : auto_quadrature_nodes(dist.sigma, config.quadrature.halfwidth_sigma, t_max);
  const auto rule = gauss_legendre(order);
  std::vector<Node> nodes(order);
  double mass = 0.0;
  for (std::size_t i = 0; i < order; ++i) {
    const double x = half * rule->nodes[i];
    const double w = half * rule->weights[i] * dist.density(x);
    nodes[i] = {x, w};
    mass += w;
  }
  const double outside = 1.0 - mass;
  if (std::abs(outside) > kSupportTolerance) {
    throw QuadratureSupportError("distribution mass outside the quadrature support is " + std::to_string(outside),
                                 outside);
  }
  return nodes;
}

void accumulate_analytic(const DriveParams& drive, double shift, double weight, const TimeGrid& times,
                         std::vector<double>& acc) {
  const double d = drive.delta + shift;
  const double w_r = std::hypot(drive.omega0, d);
  const double amp = 0.5 * weight * drive.omega0 * drive.omega0 / (w_r * w_r);
  for (std::size_t k = 0; k < times.n; ++k) acc[k] += amp * (1.0 - std::cos(w_r * times.at(k)));
}

}  // namespace

void EnsembleConfig::validate() const {
  drive.validate();
  distribution.validate();
  if (!(quadrature.halfwidth_sigma >= 5.0) || !std::isfinite(quadrature.halfwidth_sigma))
    throw ConfigError("quadrature.halfwidth_sigma", "must be at least 5");
  if (quadrature.nodes != 0 && quadrature.nodes < 201) throw ConfigError("quadrature.nodes", "must be 0 (auto) or >= 201");
  if (const auto* m = std::get_if<MultilevelModel>(&atom_model)) {
    if (!(m->quadratic_shift >= 0.0)) throw ConfigError("atom_model.quadratic_shift", "must be >= 0");
    if (!(m->gamma >= 0.0) || !std::isfinite(m->gamma)) throw ConfigError("atom_model.gamma", "must be >= 0");
    if (!(m->relaxation >= 0.0) || !std::isfinite(m->relaxation))
      throw ConfigError("atom_model.relaxation", "must be >= 0");
    if (!(m->pumping_fraction >= 0.0 && m->pumping_fraction <= 1.0))
      throw ConfigError("atom_model.pumping_fraction", "must lie in [0, 1]");
  }
}

std::size_t auto_quadrature_nodes(double sigma, double halfwidth_sigma, double t_max) {
  // Phase of the integrand spans at most (support width) * t_max radians.
  const double span = 2.0 * halfwidth_sigma * sigma * std::max(t_max, 0.0);
  return std::max<std::size_t>(2001, static_cast<std::size_t>(std::ceil(0.75 * span)) + 201);
}

std::vector<double> atom_signal(const EnsembleConfig& config, double local_shift, const TimeGrid& times) {
  std::vector<double> out(times.n, 0.0);
  if (std::holds_alternative<AnalyticTwoLevel>(config.atom_model)) {
    accumulate_analytic(config.drive, local_shift, 1.0, times, out);
    return out;
  }
  const auto& m = std::get<MultilevelModel>(config.atom_model);
  const LevelSystem s = build_f2_system(config.drive, local_shift, m.quadratic_shift, m.gamma, m.relaxation);
  return level_population_exact(s, DensityMatrix::pumped(5, m.pumping_fraction), times, 1);
}

OscillationTrace ensemble_signal(const EnsembleConfig& config, const TimeGrid& times, std::size_t threads) {
  config.validate();
  validate_grid(times);
  const std::vector<Node> nodes = build_nodes(config, times.t_end());
  const bool analytic = std::holds_alternative<AnalyticTwoLevel>(config.atom_model);

  const std::size_t n_chunks = (nodes.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<double>> partial(n_chunks);
  parallel_for(n_chunks, threads, [&](std::size_t c) {
    std::vector<double> acc(times.n, 0.0);
    const std::size_t end = std::min(nodes.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      if (nodes[i].weight == 0.0) continue;
      if (analytic) {
        accumulate_analytic(config.drive, nodes[i].shift, nodes[i].weight, times, acc);
      } else {
        const auto p1 = atom_signal(config, nodes[i].shift, times);
        for (std::size_t k = 0; k < times.n; ++k) acc[k] += nodes[i].weight * p1[k];
      }
    }
    partial[c] = std::move(acc);
  });

  OscillationTrace out{times.t0, times.dt, std::vector<double>(times.n, 0.0)};
  for (const auto& p : partial)
    for (std::size_t k = 0; k < times.n; ++k) out.values[k] += p[k];
  return out;
}

MonteCarloResult monte_carlo_signal(const EnsembleConfig& config, const TimeGrid& times, std::size_t n_samples,
                                    std::uint64_t seed, std::size_t threads) {
  config.validate();
  validate_grid(times);
  if (n_samples < 1000) throw ConfigError("n_samples", "must be at least 1000");

  const std::size_t n_blocks = (n_samples + kSampleBlock - 1) / kSampleBlock;
  struct Moments {
    std::vector<double> sum, sum_sq;
  };
  std::vector<Moments> partial(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    std::mt19937_64 rng(seq);
    DetuningSampler sampler(config.distribution);
    Moments m{std::vector<double>(times.n, 0.0), std::vector<double>(times.n, 0.0)};
    const std::size_t end = std::min(n_samples, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const auto s = atom_signal(config, sampler(rng), times);
      for (std::size_t k = 0; k < times.n; ++k) {
        m.sum[k] += s[k];
        m.sum_sq[k] += s[k] * s[k];
      }
    }
    partial[b] = std::move(m);
  });

  MonteCarloResult r;
  r.mean = {times.t0, times.dt, std::vector<double>(times.n, 0.0)};
  r.standard_error.assign(times.n, 0.0);
  std::vector<double> sum_sq(times.n, 0.0);
  for (const auto& p : partial)
    for (std::size_t k = 0; k < times.n; ++k) {
      r.mean.values[k] += p.sum[k];
      sum_sq[k] += p.sum_sq[k];
    }
  const auto n = static_cast<double>(n_samples);
  for (std::size_t k = 0; k < times.n; ++k) {
    const double mean = r.mean.values[k] / n;
    const double var = std::max(0.0, (sum_sq[k] / n - mean * mean) * n / (n - 1.0));
    r.mean.values[k] = mean;
    r.standard_error[k] = std::sqrt(var / n);
  }
  return r;
}

}  // namespace rabi
