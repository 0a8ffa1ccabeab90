#include "rabi/detail/levenberg_marquardt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rabi/errors.hpp"

namespace rabi::detail {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd p0, const LmOptions& options) {
  if (problem.project) problem.project(p0);
  LmResult cur;
  cur.params = std::move(p0);
  problem.evaluate(cur.params, cur.residuals, &cur.jacobian);
  cur.cost = cur.residuals.squaredNorm();
  if (!std::isfinite(cur.cost)) throw FitError("non-finite residuals at the starting point", to_std(cur.params));

  const Eigen::Index np = cur.params.size();
  double lambda = options.initial_lambda;
  Eigen::VectorXd trial_r;
  Eigen::MatrixXd trial_j;

  for (int it = 1; it <= options.max_iterations; ++it) {
    cur.iterations = it;
    if (cur.cost == 0.0) return cur;
    const Eigen::MatrixXd jtj = cur.jacobian.transpose() * cur.jacobian;
    const Eigen::VectorXd g = cur.jacobian.transpose() * cur.residuals;
    Eigen::VectorXd diag = jtj.diagonal();
    const double dmax = std::max(diag.maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < np; ++i) diag(i) = std::max(diag(i), 1e-12 * dmax);

    double scaled_grad = 0.0;
    for (Eigen::Index i = 0; i < np; ++i)
      scaled_grad = std::max(scaled_grad, std::abs(g(i)) / std::sqrt(diag(i) * cur.cost));
    if (scaled_grad < options.gtol) return cur;

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      Eigen::VectorXd step = a.ldlt().solve(-g);
      Eigen::VectorXd trial = cur.params + step;
      if (problem.project) {
        problem.project(trial);
        // Parameters pinned at a bound are held fixed and the step is
        // recomputed for the rest.
        std::vector<Eigen::Index> pinned;
        for (Eigen::Index i = 0; i < np; ++i)
          if (step(i) != 0.0 && trial(i) == cur.params(i)) pinned.push_back(i);
        if (!pinned.empty() && static_cast<Eigen::Index>(pinned.size()) < np) {
          Eigen::VectorXd rhs = -g;
          for (auto i : pinned) {
            a.row(i).setZero();
            a.col(i).setZero();
            a(i, i) = 1.0;
            rhs(i) = 0.0;
          }
          step = a.ldlt().solve(rhs);
          trial = cur.params + step;
          problem.project(trial);
        }
      }
      problem.evaluate(trial, trial_r, &trial_j);
      const double cost = trial_r.squaredNorm();
      if (std::isfinite(cost) && cost <= cur.cost) {
        const double decrease = cur.cost - cost;
        const double moved = (trial - cur.params).norm();
        cur.params = std::move(trial);
        cur.residuals = trial_r;
        cur.jacobian = trial_j;
        cur.cost = cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (decrease <= options.ftol * (cost + 1e-300) || moved <= options.xtol * (cur.params.norm() + options.xtol))
          return cur;
      } else {
        lambda *= 4.0;
        // No direction reduces the cost any more: a (local) minimum.
        if (lambda > 1e16) return cur;
      }
    }
  }
  throw FitError("no convergence after " + std::to_string(options.max_iterations) + " iterations",
                 to_std(cur.params));
}

}  // namespace rabi::detail
