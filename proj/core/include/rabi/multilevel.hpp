#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <limits>
#include <vector>

#include "rabi/core_model.hpp"
#include "rabi/trace.hpp"
#include "rabi/units.hpp"

namespace rabi {

/// Quadratic Zeeman term that puts the |2,1> <-> |2,0> transition 100 kHz
/// off resonance.
inline constexpr double kDefaultQuadraticShift = khz_to_angular(100.0);

/// Passing this as quadratic_shift decouples everything below m = 1.
inline constexpr double kIsolatedQuadraticShift = std::numeric_limits<double>::infinity();

/// Rotating-frame description of a Zeeman ladder. Level i is m = F - i.
struct LevelSystem {
  std::size_t n_levels = 0;
  std::vector<double> level_shifts;  ///< rad/ms
  Eigen::MatrixXd coupling;          ///< symmetric, nonzero only for |i - j| = 1
  double gamma = 0.0;                ///< dephasing rate of every coherence (1/ms)
  double relaxation = 0.0;           ///< population relaxation toward I/n (1/ms)

  void validate() const;
  /// H = diag(level_shifts) + coupling / 2.
  Eigen::MatrixXcd hamiltonian() const;
  /// Matrix acting on column-major vec(rho).
  Eigen::MatrixXcd liouvillian() const;
};

/// Shifts E(m=2) = 0, E(1) = d, E(0) = 2d + q, E(-1) = 3d + 3q, E(-2) = 4d + 6q
/// with d = drive.delta + local_shift and q = quadratic_shift, so adjacent
/// transitions are detuned by d, d + q, d + 2q, d + 3q. Couplings follow the
/// F = 2 ladder normalised to omega0 on the 2 <-> 1 transition.
/// omega0 = 0 is allowed here (undriven system). quadratic_shift = infinity
/// keeps only the {m=2, m=1} block coupled.
LevelSystem build_f2_system(const DriveParams& drive, double local_shift, double quadratic_shift, double gamma,
                            double relaxation = 0.0, std::size_t n_levels = 5);

struct DensityMatrix {
  Eigen::MatrixXcd elements;

  /// Pure state |level><level|.
  static DensityMatrix pure(std::size_t n_levels, std::size_t level);
  /// Fraction `pumped` in level 0, the rest spread evenly over the other levels.
  static DensityMatrix pumped(std::size_t n_levels, double pumped);

  std::size_t size() const noexcept { return static_cast<std::size_t>(elements.rows()); }
  double trace_error() const;
  double hermiticity_error() const;
  double purity() const;
  double min_eigenvalue() const;
  /// Throws ConfigError unless Hermitian, unit-trace and positive within 1e-6.
  void validate() const;
};

enum class Integrator { dopri5, rk4 };

struct EvolveOptions {
  Integrator method = Integrator::dopri5;
  double rtol = 1e-8;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();  ///< ms
  double rk4_step = 1e-4;                                     ///< ms
  std::size_t max_steps = 5'000'000;
  double invariant_tolerance = 1e-6;
};

struct EvolutionResult {
  OscillationTrace p1;                          ///< population of m = 1
  std::vector<std::vector<double>> populations; ///< per sample, per level
  std::vector<double> purity;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  double largest_step = 0.0;
};

/// Integrates d rho/dt = -i[H, rho] + D(rho) from rho0 at t = 0 and samples
/// the grid (all grid times must be >= 0). D damps coherences at gamma and,
/// if relaxation > 0, adds relaxation * (tr(rho) I/n - rho).
/// Throws IntegrationError if step control fails and InvariantError if the
/// trace or Hermiticity drifts past options.invariant_tolerance.
EvolutionResult evolve(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times,
                       const EvolveOptions& options = {});

/// Same dynamics through the exact propagator exp(L dt); exact for the
/// piecewise-constant generator used here and much cheaper for many detunings.
EvolutionResult propagate_exact(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times);

/// Population of one level through the exact propagator, without the
/// per-sample invariant bookkeeping. Inputs are not validated; this is the
/// inner kernel of ensemble averages.
std::vector<double> level_population_exact(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times,
                                           std::size_t level);

/// build_f2_system + evolve from |2,2><2,2|.
OscillationTrace p1_multilevel(const DriveParams& drive, double local_shift, double quadratic_shift, double gamma,
                               const TimeGrid& times, const EvolveOptions& options = {});

}  // namespace rabi
