#include "rabi/fit.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "rabi/detail/levenberg_marquardt.hpp"
#include "rabi/errors.hpp"
#include "rabi/spectrum.hpp"
#include "rabi/units.hpp"

namespace rabi {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
constexpr double kInf = std::numeric_limits<double>::infinity();

double wrap_phase(double phi) {
  phi = std::remainder(phi, kTwoPi);
  return phi <= -std::numbers::pi ? phi + kTwoPi : phi;
}

struct Window {
  std::vector<double> t;
  std::vector<double> y;
  double ss_tot = 0.0;
  double mean = 0.0;
};

Window extract(const OscillationTrace& trace, double t_min, double t_max) {
  trace.validate();
  if (!(t_max > t_min)) throw ConfigError("window", "t_max must exceed t_min");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_max));
  if (t_min < trace.t0 - slack || t_max > trace.time(trace.size() - 1) + slack)
    throw ConfigError("window", "extends beyond the trace");
  Window w;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.time(k);
    if (t >= t_min - slack && t <= t_max + slack) {
      w.t.push_back(t);
      w.y.push_back(trace.values[k]);
    }
  }
  if (w.t.size() < kMinFitSamples) throw ConfigError("window", "needs at least 30 samples");
  for (double v : w.y) w.mean += v;
  w.mean /= static_cast<double>(w.y.size());
  for (double v : w.y) w.ss_tot += (v - w.mean) * (v - w.mean);
  return w;
}

bool is_flat(const Window& w) {
  const auto [lo, hi] = std::minmax_element(w.y.begin(), w.y.end());
  return *hi - *lo <= 1e-12 * std::max(1.0, std::abs(w.mean));
}

double r_squared(double ss_res, double ss_tot) {
  if (ss_tot <= 0.0) return 0.0;
  return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

// Full-parameter model with some parameters held fixed.
using FullEval = std::function<void(const VectorXd& p, VectorXd& r, MatrixXd* J)>;

struct MaskedProblem {
  FullEval eval;
  std::vector<int> free;
  VectorXd base;

  VectorXd expand(const VectorXd& q) const {
    VectorXd p = base;
    for (std::size_t i = 0; i < free.size(); ++i) p(free[i]) = q(static_cast<Eigen::Index>(i));
    return p;
  }
  VectorXd reduce(const VectorXd& p) const {
    VectorXd q(static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) q(static_cast<Eigen::Index>(i)) = p(free[i]);
    return q;
  }
  MatrixXd reduce_jacobian(const MatrixXd& j) const {
    MatrixXd out(j.rows(), static_cast<Eigen::Index>(free.size()));
    for (std::size_t i = 0; i < free.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = j.col(free[i]);
    return out;
  }

  struct Solution {
    VectorXd p;
    double cost;
    int iterations;
  };

  Solution solve(const VectorXd& start, const std::function<void(VectorXd&)>& project_full, int max_iter) const {
    detail::LmProblem prob;
    prob.evaluate = [this](const VectorXd& q, VectorXd& r, MatrixXd* J) {
      MatrixXd full_j;
      eval(expand(q), r, J ? &full_j : nullptr);
      if (J) *J = reduce_jacobian(full_j);
    };
    if (project_full) {
      prob.project = [&, this](VectorXd& q) {
        VectorXd p = expand(q);
        project_full(p);
        q = reduce(p);
      };
    }
    detail::LmOptions opt;
    opt.max_iterations = max_iter;
    opt.ftol = 1e-14;
    opt.xtol = 1e-12;
    const auto res = detail::levenberg_marquardt(prob, reduce(start), opt);
    return {expand(res.params), res.cost, res.iterations};
  }

  // 95% half-widths from the linearised covariance; fixed parameters get 0.
  std::vector<double> confidence(const VectorXd& p, std::size_t n_points) const {
    VectorXd r;
    MatrixXd j;
    eval(p, r, &j);
    const MatrixXd jr = reduce_jacobian(j);
    std::vector<double> ci(static_cast<std::size_t>(p.size()), 0.0);
    const auto dof = static_cast<long>(n_points) - static_cast<long>(free.size());
    if (dof <= 0) {
      for (int i : free) ci[static_cast<std::size_t>(i)] = kInf;
      return ci;
    }
    const double s2 = r.squaredNorm() / static_cast<double>(dof);
    const MatrixXd cov = (jr.transpose() * jr).completeOrthogonalDecomposition().pseudoInverse() * s2;
    const boost::math::students_t dist(static_cast<double>(dof));
    const double tq = boost::math::quantile(dist, 0.975);
    for (std::size_t i = 0; i < free.size(); ++i) {
      const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
      ci[static_cast<std::size_t>(free[i])] = v >= 0.0 && std::isfinite(v) ? tq * std::sqrt(v) : kInf;
    }
    return ci;
  }
};

// Columns of a small dense least-squares problem solved via QR.
VectorXd linear_solve(const MatrixXd& m, const std::vector<double>& y, double* cost) {
  const VectorXd yy = Eigen::Map<const VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  const VectorXd c = m.colPivHouseholderQr().solve(yy);
  if (cost) *cost = (m * c - yy).squaredNorm();
  return c;
}

double decay_factor(DecayLaw law, double gamma, double t) {
  return law == DecayLaw::exponential ? std::exp(-gamma * t) : std::exp(-0.5 * gamma * gamma * t * t);
}

std::vector<double> candidate_frequencies(const Window& w, double dt, std::size_t count) {
  OscillationTrace sub{w.t.front(), dt, w.y};
  std::vector<double> out;
  if (sub.size() >= kMinSpectrumSamples) {
    const auto spec = fft_spectrum(sub);
    for (const auto& pk : spec.peaks) {
      if (out.size() >= count) break;
      out.push_back(khz_to_angular(pk.frequency_khz));
    }
    if (out.empty()) {
      const auto it = std::max_element(spec.power.begin() + 1, spec.power.end());
      out.push_back(khz_to_angular(spec.freqs[static_cast<std::size_t>(it - spec.power.begin())]));
    }
  }
  return out;
}

}  // namespace

double SingleFreqFit::operator()(double t) const {
  return A * decay_factor(decay, gamma, t) * std::cos(omega * t + phi) + B * t + C;
}

SingleFreqFit fit_single_frequency(const OscillationTrace& trace, double t_min, double t_max,
                                   const SingleFitOptions& options) {
  const Window w = extract(trace, t_min, t_max);
  const auto m = static_cast<Eigen::Index>(w.t.size());
  const DecayLaw law = options.decay;

  SingleFreqFit out;
  out.decay = law;
  if (is_flat(w)) {
    out.C = w.mean;
    out.degenerate = true;
    out.ci95.fill(kInf);
    return out;
  }

  MaskedProblem prob;
  prob.eval = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    r.resize(m);
    if (J) J->resize(m, 6);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double t = w.t[static_cast<std::size_t>(k)];
      const double e = decay_factor(law, p(1), t);
      const double c = std::cos(p(2) * t + p(3));
      const double s = std::sin(p(2) * t + p(3));
      r(k) = p(0) * e * c + p(4) * t + p(5) - w.y[static_cast<std::size_t>(k)];
      if (J) {
        (*J)(k, 0) = e * c;
        (*J)(k, 1) = (law == DecayLaw::exponential ? -t : -p(1) * t * t) * p(0) * e * c;
        (*J)(k, 2) = -p(0) * e * t * s;
        (*J)(k, 3) = -p(0) * e * s;
        (*J)(k, 4) = t;
        (*J)(k, 5) = 1.0;
      }
    }
  };
  prob.free = options.drift ? std::vector<int>{0, 1, 2, 3, 4, 5} : std::vector<int>{0, 1, 2, 3, 5};
  prob.base = VectorXd::Zero(6);
  std::function<void(VectorXd&)> project;
  if (law == DecayLaw::gaussian) project = [](VectorXd& p) { p(1) = std::abs(p(1)); };

  const double span = w.t.back() - w.t.front();
  const auto omegas = candidate_frequencies(w, trace.dt, options.frequency_starts);
  const std::array<double, 2> gammas{0.3 / span, 2.0 / span};

  std::optional<MaskedProblem::Solution> best;
  std::optional<FitError> last_error;
  for (double om : omegas) {
    for (double g : gammas) {
      MatrixXd basis(m, options.drift ? 4 : 3);
      for (Eigen::Index k = 0; k < m; ++k) {
        const double t = w.t[static_cast<std::size_t>(k)];
        const double e = decay_factor(law, g, t);
        basis(k, 0) = e * std::cos(om * t);
        basis(k, 1) = e * std::sin(om * t);
        basis(k, 2) = 1.0;
        if (options.drift) basis(k, 3) = t;
      }
      const VectorXd c = linear_solve(basis, w.y, nullptr);
      VectorXd p0(6);
      p0 << std::hypot(c(0), c(1)), g, om, std::atan2(-c(1), c(0)), options.drift ? c(3) : 0.0, c(2);
      try {
        auto sol = prob.solve(p0, project, options.max_iterations);
        if (!best || sol.cost < best->cost) best = std::move(sol);
      } catch (const FitError& e) {
        last_error = e;
      }
    }
  }
  if (!best) {
    if (last_error) throw *last_error;
    throw FitError("no starting frequency found", {});
  }

  VectorXd p = best->p;
  if (p(0) < 0.0) {
    p(0) = -p(0);
    p(3) += std::numbers::pi;
  }
  if (p(2) < 0.0) {
    p(2) = -p(2);
    p(3) = -p(3);
  }
  p(3) = wrap_phase(p(3));
  if (law == DecayLaw::gaussian) p(1) = std::abs(p(1));

  const auto ci = prob.confidence(p, w.t.size());
  out.A = p(0);
  out.gamma = p(1);
  out.omega = p(2);
  out.phi = p(3);
  out.B = p(4);
  out.C = p(5);
  std::copy(ci.begin(), ci.end(), out.ci95.begin());
  out.r_squared = r_squared(best->cost, w.ss_tot);
  out.iterations = best->iterations;
  return out;
}

double TwoFreqFit::operator()(double t) const {
  return A * std::exp(-0.5 * gamma_a * gamma_a * t * t) * std::cos(omega0 * t + phi_a) +
         B_amp * std::exp(-0.5 * gamma_b * gamma_b * t * t) * std::cos(omega_bar * t + phi_b) + offset;
}

double two_frequency_window(double omega0) {
  if (!(omega0 > 0.0)) throw ConfigError("omega0", "must be positive");
  return 10.0 * kTwoPi / omega0;
}

TwoFreqFit fit_two_frequency(const OscillationTrace& trace, double omega0, double t_min, double t_max,
                             const TwoFitOptions& options) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw ConfigError("omega0", "must be positive");
  if (!(options.gamma_a >= 0.0)) throw ConfigError("gamma_a", "must be >= 0");
  const Window w = extract(trace, t_min, t_max);
  const auto m = static_cast<Eigen::Index>(w.t.size());

  TwoFreqFit out;
  out.omega0 = omega0;
  out.gamma_a = options.gamma_a;
  if (is_flat(w)) {
    out.offset = w.mean;
    out.omega_bar = omega0;
    out.degenerate = true;
    out.uncertain = true;
    out.ci95.fill(kInf);
    return out;
  }

  // p = [A, phi_a, gamma_a, B, omega_bar, phi_b, gamma_b, offset]
  MaskedProblem prob;
  prob.eval = [&](const VectorXd& p, VectorXd& r, MatrixXd* J) {
    r.resize(m);
    if (J) J->resize(m, 8);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double t = w.t[static_cast<std::size_t>(k)];
      const double ea = std::exp(-0.5 * p(2) * p(2) * t * t);
      const double eb = std::exp(-0.5 * p(6) * p(6) * t * t);
      const double ca = std::cos(omega0 * t + p(1)), sa = std::sin(omega0 * t + p(1));
      const double cb = std::cos(p(4) * t + p(5)), sb = std::sin(p(4) * t + p(5));
      r(k) = p(0) * ea * ca + p(3) * eb * cb + p(7) - w.y[static_cast<std::size_t>(k)];
      if (J) {
        (*J)(k, 0) = ea * ca;
        (*J)(k, 1) = -p(0) * ea * sa;
        (*J)(k, 2) = -p(2) * t * t * p(0) * ea * ca;
        (*J)(k, 3) = eb * cb;
        (*J)(k, 4) = -p(3) * eb * t * sb;
        (*J)(k, 5) = -p(3) * eb * sb;
        (*J)(k, 6) = -p(6) * t * t * p(3) * eb * cb;
        (*J)(k, 7) = 1.0;
      }
    }
  };
  prob.free = options.fit_gamma_a ? std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7} : std::vector<int>{0, 1, 3, 4, 5, 6, 7};
  prob.base = VectorXd::Zero(8);
  prob.base(2) = options.gamma_a;
  const auto project = [omega0](VectorXd& p) {
    p(4) = std::max(p(4), omega0);
    p(2) = std::abs(p(2));
    p(6) = std::max(std::abs(p(6)), p(2));
  };

  // Coarse grid over the nonlinear pair, linear parameters solved exactly.
  struct Cell {
    double cost, omega_bar, gamma_b;
    VectorXd c;
  };
  std::vector<Cell> cells;
  constexpr int kOmegaSteps = 71, kGammaSteps = 40;
  const double ga = options.gamma_a;
  MatrixXd basis(m, 5);
  for (int i = 0; i < kOmegaSteps; ++i) {
    const double ob = omega0 * (1.0 + 7.0 * i / (kOmegaSteps - 1.0));
    for (int j = 0; j < kGammaSteps; ++j) {
      const double gb = std::max(ga, omega0 * 0.02 * std::pow(400.0, j / (kGammaSteps - 1.0)));
      for (Eigen::Index k = 0; k < m; ++k) {
        const double t = w.t[static_cast<std::size_t>(k)];
        const double ea = std::exp(-0.5 * ga * ga * t * t);
        const double eb = std::exp(-0.5 * gb * gb * t * t);
        basis(k, 0) = ea * std::cos(omega0 * t);
        basis(k, 1) = ea * std::sin(omega0 * t);
        basis(k, 2) = eb * std::cos(ob * t);
        basis(k, 3) = eb * std::sin(ob * t);
        basis(k, 4) = 1.0;
      }
      double cost = 0.0;
      VectorXd c = linear_solve(basis, w.y, &cost);
      cells.push_back({cost, ob, gb, std::move(c)});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.cost < b.cost; });

  std::optional<MaskedProblem::Solution> best;
  std::optional<FitError> last_error;
  std::vector<const Cell*> seeds;
  for (const auto& cell : cells) {
    const bool distinct = std::none_of(seeds.begin(), seeds.end(), [&](const Cell* s) {
      return std::abs(s->omega_bar - cell.omega_bar) < 0.3 * omega0 &&
             std::abs(std::log(s->gamma_b / cell.gamma_b)) < 0.7;
    });
    if (distinct) seeds.push_back(&cell);
    if (seeds.size() == 3) break;
  }
  for (const Cell* s : seeds) {
    VectorXd p0(8);
    p0 << std::hypot(s->c(0), s->c(1)), std::atan2(-s->c(1), s->c(0)), ga, std::hypot(s->c(2), s->c(3)),
        s->omega_bar, std::atan2(-s->c(3), s->c(2)), s->gamma_b, s->c(4);
    try {
      auto sol = prob.solve(p0, project, options.max_iterations);
      if (!best || sol.cost < best->cost) best = std::move(sol);
    } catch (const FitError& e) {
      last_error = e;
    }
  }
  if (!best) {
    if (last_error) throw *last_error;
    throw FitError("no usable starting point", {});
  }

  VectorXd p = best->p;
  project(p);
  for (int amp : {0, 3}) {
    if (p(amp) < 0.0) {
      p(amp) = -p(amp);
      p(amp + 1 + (amp == 3 ? 1 : 0)) += std::numbers::pi;
    }
  }
  p(1) = wrap_phase(p(1));
  p(5) = wrap_phase(p(5));

  const auto ci = prob.confidence(p, w.t.size());
  out.A = p(0);
  out.phi_a = p(1);
  out.gamma_a = p(2);
  out.B_amp = p(3);
  out.omega_bar = p(4);
  out.phi_b = p(5);
  out.gamma_b = p(6);
  out.offset = p(7);
  std::copy(ci.begin(), ci.end(), out.ci95.begin());
  out.r_squared = r_squared(best->cost, w.ss_tot);
  out.iterations = best->iterations;
  out.fraction_A = out.A + out.B_amp > 0.0 ? out.A / (out.A + out.B_amp) : 0.0;
  for (int idx : {0, 3, 4, 6}) {
    const auto i = static_cast<std::size_t>(idx);
    if (2.0 * out.ci95[i] > options.uncertainty_threshold * std::abs(p(idx))) out.uncertain = true;
  }
  out.indistinguishable = std::abs(out.omega_bar - omega0) <= out.ci95[4];
  return out;
}

std::vector<FrequencyTrackPoint> sliding_window_frequency(const OscillationTrace& trace, double window_length,
                                                          double hop, DecayLaw decay) {
  trace.validate();
  if (!(window_length > 0.0)) throw ConfigError("window_length", "must be positive");
  if (!(hop > 0.0)) throw ConfigError("hop", "must be positive");
  const double t_end = trace.time(trace.size() - 1);
  const double slack = 1e-9 * std::max(1.0, t_end);

  SingleFitOptions opt;
  opt.decay = decay;
  opt.drift = false;
  std::vector<FrequencyTrackPoint> track;
  for (std::size_t i = 0;; ++i) {
    const double start = trace.t0 + static_cast<double>(i) * hop;
    const double stop = start + window_length;
    if (stop > t_end + slack) break;
    FrequencyTrackPoint pt;
    pt.t_center = 0.5 * (start + stop);
    try {
      const auto fit = fit_single_frequency(trace, start, std::min(stop, t_end), opt);
      pt.omega = fit.omega;
      pt.ci95 = fit.ci95[2];
      if (fit.degenerate) {
        pt.error = "flat window";
      } else if (window_length * fit.omega < 3.0 * kTwoPi) {
        pt.error = "window shorter than three periods";
      } else {
        pt.ok = true;
      }
    } catch (const Error& e) {
      pt.error = e.what();
    }
    track.push_back(std::move(pt));
  }
  return track;
}

}  // namespace rabi
