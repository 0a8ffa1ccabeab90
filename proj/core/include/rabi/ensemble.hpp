#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rabi/core_model.hpp"
#include "rabi/distribution.hpp"
#include "rabi/multilevel.hpp"
#include "rabi/trace.hpp"

namespace rabi {

/// Per-atom signal (Omega0/Omega_R)^2 sin^2(Omega_R t / 2).
struct AnalyticTwoLevel {};

/// Per-atom m = 1 population from the five-level master equation.
struct MultilevelModel {
  double quadratic_shift = kDefaultQuadraticShift;
  double gamma = 0.0;
  double relaxation = 0.0;
  double pumping_fraction = 1.0;
};

using AtomModel = std::variant<AnalyticTwoLevel, MultilevelModel>;

struct QuadratureSpec {
  /// 0 picks a node count from the time horizon (at least 2001).
  std::size_t nodes = 0;
  /// Support is the mean +- halfwidth_sigma * sigma.
  double halfwidth_sigma = 8.0;
};

struct EnsembleConfig {
  DriveParams drive;
  DetuningDistribution distribution;
  AtomModel atom_model = AnalyticTwoLevel{};
  QuadratureSpec quadrature;

  void validate() const;
};

/// Node count used for a parametric distribution over the given horizon.
std::size_t auto_quadrature_nodes(double sigma, double halfwidth_sigma, double t_max);

/// S(t) = integral of rho(delta) P1(delta, t) over the local shifts, by
/// Gauss-Legendre quadrature for parametric distributions and by direct
/// summation for histograms. Results do not depend on `threads`.
/// Throws QuadratureSupportError if more than 1e-6 of the probability mass
/// is missed by the quadrature support.
OscillationTrace ensemble_signal(const EnsembleConfig& config, const TimeGrid& times, std::size_t threads = 1);

struct MonteCarloResult {
  OscillationTrace mean;
  std::vector<double> standard_error;
};

/// Sample mean of the per-atom signal over n_samples drawn shifts. Samples
/// are drawn in fixed blocks, each with its own generator seeded from
/// (seed, block), so output is bit-identical for a given seed at any
/// thread count.
MonteCarloResult monte_carlo_signal(const EnsembleConfig& config, const TimeGrid& times, std::size_t n_samples,
                                    std::uint64_t seed, std::size_t threads = 1);

/// Single-atom signal on the grid for the given local shift.
std::vector<double> atom_signal(const EnsembleConfig& config, double local_shift, const TimeGrid& times);

}  // namespace rabi
