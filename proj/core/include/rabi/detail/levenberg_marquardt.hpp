#pragma once

#include <Eigen/Dense>
#include <functional>

namespace rabi::detail {

struct LmProblem {
  /// Fills residuals r (model - data) and, when J is non-null, the Jacobian.
  std::function<void(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* J)> evaluate;
  /// Optional projection onto the feasible set, applied after every step.
  std::function<void(Eigen::VectorXd& p)> project;
};

struct LmOptions {
  int max_iterations = 200;
  double ftol = 1e-12;  ///< relative cost decrease that counts as converged
  double xtol = 1e-10;  ///< relative step size that counts as converged
  double gtol = 1e-14;  ///< scaled gradient norm that counts as converged
  double initial_lambda = 1e-3;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  double cost = 0.0;  ///< sum of squared residuals
  int iterations = 0;
};

/// Levenberg-Marquardt with Marquardt's diagonal scaling. Throws FitError,
/// carrying the last iterate, if max_iterations pass without convergence or
/// the residuals become non-finite.
LmResult levenberg_marquardt(const LmProblem& problem, Eigen::VectorXd p0, const LmOptions& options = {});

}  // namespace rabi::detail
