#include "rabi/multilevel.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>

#include "rabi/errors.hpp"

namespace rabi {

namespace {

using Matrix = Eigen::MatrixXcd;
constexpr std::complex<double> kI{0.0, 1.0};

struct Generator {
  Matrix h;
  double gamma;
  double relaxation;

  explicit Generator(const LevelSystem& s) : h(s.hamiltonian()), gamma(s.gamma), relaxation(s.relaxation) {}

  void operator()(const Matrix& rho, Matrix& out) const {
    out.noalias() = -kI * (h * rho);
    out.noalias() += kI * (rho * h);
    const Eigen::Index n = rho.rows();
    if (gamma != 0.0) {
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
          if (i != j) out(i, j) -= gamma * rho(i, j);
    }
    if (relaxation != 0.0) {
      const std::complex<double> tr = rho.trace();
      out -= relaxation * rho;
      for (Eigen::Index i = 0; i < n; ++i) out(i, i) += relaxation * tr / static_cast<double>(n);
    }
  }
};

void check_grid(const TimeGrid& times) {
  validate_grid(times);
  if (times.t0 < 0.0) throw ConfigError("times.t0", "evolution starts at t = 0; grid times must be >= 0");
}

struct Recorder {
  EvolutionResult& result;
  double tolerance;
  std::size_t k = 0;

  void record(const Matrix& rho) {
    const DensityMatrix dm{rho};
    const double tr_err = dm.trace_error();
    const double herm_err = dm.hermiticity_error();
    result.max_trace_error = std::max(result.max_trace_error, tr_err);
    result.max_hermiticity_error = std::max(result.max_hermiticity_error, herm_err);
    if (tr_err > tolerance || herm_err > tolerance) {
      throw InvariantError("density matrix drifted at sample " + std::to_string(k) +
                           " (trace error " + std::to_string(tr_err) + ", hermiticity error " +
                           std::to_string(herm_err) + ")");
    }
    std::vector<double> pops(static_cast<std::size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) pops[static_cast<std::size_t>(i)] = rho(i, i).real();
    result.p1.values[k] = pops.size() > 1 ? pops[1] : 0.0;
    result.populations[k] = std::move(pops);
    result.purity[k] = dm.purity();
    ++k;
  }
};

EvolutionResult make_result(const TimeGrid& times) {
  EvolutionResult r;
  r.p1.t0 = times.t0;
  r.p1.dt = times.dt;
  r.p1.values.assign(times.n, 0.0);
  r.populations.resize(times.n);
  r.purity.assign(times.n, 0.0);
  return r;
}

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sk = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    acc += std::norm(err(i)) / (sk * sk);
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

void integrate_dopri5(const Generator& f, const Matrix& rho0, const TimeGrid& times, const EvolveOptions& opt,
                      Recorder& rec) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const Eigen::Index n = rho0.rows();
  Matrix y = rho0, y1(n, n), tmp(n, n), err(n, n);
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n);
  Matrix r2(n, n), r3(n, n), r4(n, n), r5(n, n);

  const double t_last = times.t_end();
  double t = 0.0;
  std::size_t next = 0;
  while (next < times.n && times.at(next) <= 0.0) {
    rec.record(y);
    ++next;
  }

  const double rate = f.h.cwiseAbs().rowwise().sum().maxCoeff() + f.gamma + f.relaxation;
  double h = std::min(opt.max_step, 0.01 / std::max(rate, 1e-3));
  f(y, k1);
  std::size_t steps = 0;
  while (next < times.n) {
    if (++steps > opt.max_steps) throw IntegrationError("step budget exhausted at t = " + std::to_string(t));
    h = std::min({h, opt.max_step, t_last - t});
    if (!(h > 1e-14 * std::max(1.0, t))) throw IntegrationError("step size underflow at t = " + std::to_string(t));

    tmp = y + h * a21 * k1;
    f(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(tmp, k6);
    y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(y1, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = error_norm(err, y, y1, opt.rtol, opt.atol);
    if (!std::isfinite(en)) throw IntegrationError("non-finite error estimate at t = " + std::to_string(t));
    const double factor = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-30), -0.2)));
    if (en > 1.0) {
      ++rec.result.rejected_steps;
      h *= std::min(1.0, factor);
      continue;
    }

    const double t_new = t + h;
    if (next < times.n && times.at(next) <= t_new + 1e-12 * std::max(1.0, t_new)) {
      const Matrix ydiff = y1 - y;
      r2 = ydiff;
      r3 = h * k1 - ydiff;
      r4 = ydiff - h * k7 - r3;
      r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next < times.n && times.at(next) <= t_new + 1e-12 * std::max(1.0, t_new)) {
        const double theta = std::clamp((times.at(next) - t) / h, 0.0, 1.0);
        const double theta1 = 1.0 - theta;
        tmp = y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        rec.record(tmp);
        ++next;
      }
    }

    ++rec.result.accepted_steps;
    rec.result.largest_step = std::max(rec.result.largest_step, h);
    t = t_new;
    y = y1;
    k1 = k7;
    h *= factor;
  }
}

void integrate_rk4(const Generator& f, const Matrix& rho0, const TimeGrid& times, const EvolveOptions& opt,
                   Recorder& rec) {
  if (!(opt.rk4_step > 0.0)) throw ConfigError("rk4_step", "must be positive");
  const Eigen::Index n = rho0.rows();
  Matrix y = rho0, k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
  auto advance = [&](double span) {
    if (span <= 0.0) return;
    const auto m = static_cast<std::size_t>(std::ceil(span / std::min(opt.rk4_step, opt.max_step) - 1e-9));
    const double h = span / static_cast<double>(std::max<std::size_t>(m, 1));
    for (std::size_t s = 0; s < std::max<std::size_t>(m, 1); ++s) {
      f(y, k1);
      tmp = y + 0.5 * h * k1;
      f(tmp, k2);
      tmp = y + 0.5 * h * k2;
      f(tmp, k3);
      tmp = y + h * k3;
      f(tmp, k4);
      y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++rec.result.accepted_steps;
      rec.result.largest_step = std::max(rec.result.largest_step, h);
    }
  };
  double t = 0.0;
  for (std::size_t k = 0; k < times.n; ++k) {
    advance(times.at(k) - t);
    t = times.at(k);
    rec.record(y);
  }
}

}  // namespace

void LevelSystem::validate() const {
  if (n_levels < 2) throw ConfigError("n_levels", "need at least two levels");
  if (level_shifts.size() != n_levels) throw ConfigError("level_shifts", "size must equal n_levels");
  if (coupling.rows() != static_cast<Eigen::Index>(n_levels) || coupling.cols() != coupling.rows())
    throw ConfigError("coupling", "must be n_levels x n_levels");
  if (!coupling.allFinite()) throw ConfigError("coupling", "must be finite");
  if ((coupling - coupling.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError("coupling", "must be symmetric");
  for (double e : level_shifts)
    if (!std::isfinite(e)) throw ConfigError("level_shifts", "must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma", "must be non-negative");
  if (!(relaxation >= 0.0) || !std::isfinite(relaxation)) throw ConfigError("relaxation", "must be non-negative");
}

Eigen::MatrixXcd LevelSystem::hamiltonian() const {
  Eigen::MatrixXcd h = (0.5 * coupling).cast<std::complex<double>>();
  for (std::size_t i = 0; i < n_levels; ++i) h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += level_shifts[i];
  return h;
}

Eigen::MatrixXcd LevelSystem::liouvillian() const {
  const auto n = static_cast<Eigen::Index>(n_levels);
  const Matrix h = hamiltonian();
  Matrix l = Matrix::Zero(n * n, n * n);
  // Column-major vec: element (i, j) sits at j * n + i.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) {
        l(j * n + i, j * n + k) += -kI * h(i, k);
        l(j * n + i, k * n + i) += kI * h(k, j);
      }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index idx = j * n + i;
      if (i != j) l(idx, idx) -= gamma;
      l(idx, idx) -= relaxation;
    }
  if (relaxation != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) l(i * n + i, k * n + k) += relaxation / static_cast<double>(n);
  }
  return l;
}

LevelSystem build_f2_system(const DriveParams& drive, double local_shift, double quadratic_shift, double gamma,
                            double relaxation, std::size_t n_levels) {
  if (n_levels != 5) throw ConfigError("n_levels", "the F = 2 manifold has exactly 5 levels");
  if (!(drive.omega0 >= 0.0) || !std::isfinite(drive.omega0)) throw ConfigError("drive.omega0", "must be >= 0");
  if (!std::isfinite(drive.delta) || !std::isfinite(local_shift)) throw ConfigError("drive.delta", "must be finite");
  if (!(quadratic_shift >= 0.0)) throw ConfigError("quadratic_shift", "must be >= 0");

  LevelSystem s;
  s.n_levels = 5;
  s.gamma = gamma;
  s.relaxation = relaxation;
  const double d = drive.delta + local_shift;
  const bool isolated = std::isinf(quadratic_shift);
  const double q = isolated ? 0.0 : quadratic_shift;
  s.level_shifts = {0.0, d, 2 * d + q, 3 * d + 3 * q, 4 * d + 6 * q};
  if (isolated) s.level_shifts[2] = s.level_shifts[3] = s.level_shifts[4] = 0.0;

  // <m'|F_perp|m> ~ sqrt(F(F+1) - m m') / 2, normalised to the 2 <-> 1 element.
  const double f = 2.0;
  auto ladder = [f](double m) { return 0.5 * std::sqrt(f * (f + 1) - m * (m - 1)); };
  const double norm = ladder(2.0);
  s.coupling = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 4; ++i) {
    if (isolated && i > 0) break;
    const double c = drive.omega0 * ladder(2.0 - i) / norm;
    s.coupling(i, i + 1) = s.coupling(i + 1, i) = c;
  }
  s.validate();
  return s;
}

DensityMatrix DensityMatrix::pure(std::size_t n_levels, std::size_t level) {
  if (level >= n_levels) throw ConfigError("level", "outside the level range");
  const auto n = static_cast<Eigen::Index>(n_levels);
  DensityMatrix dm{Matrix::Zero(n, n)};
  dm.elements(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
  return dm;
}

DensityMatrix DensityMatrix::pumped(std::size_t n_levels, double pumped) {
  if (!(pumped >= 0.0 && pumped <= 1.0)) throw ConfigError("pumping_fraction", "must lie in [0, 1]");
  if (n_levels < 2) throw ConfigError("n_levels", "need at least two levels");
  const auto n = static_cast<Eigen::Index>(n_levels);
  DensityMatrix dm{Matrix::Zero(n, n)};
  dm.elements(0, 0) = pumped;
  for (Eigen::Index i = 1; i < n; ++i) dm.elements(i, i) = (1.0 - pumped) / static_cast<double>(n - 1);
  return dm;
}

double DensityMatrix::trace_error() const { return std::abs(elements.trace() - 1.0); }

double DensityMatrix::hermiticity_error() const {
  return (elements - elements.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::purity() const { return (elements * elements).trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  const Matrix herm = 0.5 * (elements + elements.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  if (elements.rows() == 0 || elements.rows() != elements.cols()) throw ConfigError("rho0", "must be square");
  if (!elements.allFinite()) throw ConfigError("rho0", "must be finite");
  if (hermiticity_error() > 1e-6) throw ConfigError("rho0", "must be Hermitian");
  if (trace_error() > 1e-6) throw ConfigError("rho0", "must have unit trace");
  if (min_eigenvalue() < -1e-6) throw ConfigError("rho0", "must be positive semidefinite");
}

EvolutionResult evolve(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times,
                       const EvolveOptions& options) {
  system.validate();
  rho0.validate();
  if (rho0.size() != system.n_levels) throw ConfigError("rho0", "dimension does not match the level system");
  check_grid(times);
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (!(options.max_step > 0.0)) throw ConfigError("max_step", "must be positive");

  EvolutionResult result = make_result(times);
  Recorder rec{result, options.invariant_tolerance};
  const Generator f(system);
  if (options.method == Integrator::dopri5) {
    integrate_dopri5(f, rho0.elements, times, options, rec);
  } else {
    integrate_rk4(f, rho0.elements, times, options, rec);
  }
  return result;
}

EvolutionResult propagate_exact(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times) {
  system.validate();
  rho0.validate();
  if (rho0.size() != system.n_levels) throw ConfigError("rho0", "dimension does not match the level system");
  check_grid(times);

  const auto n = static_cast<Eigen::Index>(system.n_levels);
  const Matrix l = system.liouvillian();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.elements.data(), n * n);
  if (times.t0 > 0.0) v = Matrix((l * times.t0).exp()) * v;
  const Matrix step = (l * times.dt).exp();

  EvolutionResult result = make_result(times);
  Recorder rec{result, 1e-6};
  for (std::size_t k = 0; k < times.n; ++k) {
    if (k > 0) v = step * v;
    rec.record(Eigen::Map<const Matrix>(v.data(), n, n));
  }
  return result;
}

std::vector<double> level_population_exact(const LevelSystem& system, const DensityMatrix& rho0, const TimeGrid& times,
                                           std::size_t level) {
  const auto n = static_cast<Eigen::Index>(system.n_levels);
  const Matrix l = system.liouvillian();
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho0.elements.data(), n * n);
  if (times.t0 > 0.0) v = Matrix((l * times.t0).exp()) * v;
  const Matrix step = (l * times.dt).exp();
  const Eigen::Index idx = static_cast<Eigen::Index>(level) * (n + 1);
  std::vector<double> out(times.n);
  Eigen::VectorXcd next(n * n);
  for (std::size_t k = 0; k < times.n; ++k) {
    if (k > 0) {
      next.noalias() = step * v;
      v.swap(next);
    }
    out[k] = v(idx).real();
  }
  return out;
}

OscillationTrace p1_multilevel(const DriveParams& drive, double local_shift, double quadratic_shift, double gamma,
                               const TimeGrid& times, const EvolveOptions& options) {
  const LevelSystem s = build_f2_system(drive, local_shift, quadratic_shift, gamma);
  return evolve(s, DensityMatrix::pure(5, 0), times, options).p1;
}

}  // namespace rabi
