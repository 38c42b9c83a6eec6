#pragma once

#include <Eigen/Core>

#include <functional>

namespace rempc {

/// Bound-constrained smooth minimization by projected L-BFGS.
///
/// Free variables take a quasi-Newton step; variables sitting on a bound with
/// the gradient pushing outward are frozen. The step is projected back onto
/// the box and accepted by an Armijo test along the projection arc.
struct BoxSolverOptions {
  int max_iterations = 500;
  /// Stop when ||P(y - g) - y||_inf falls below this value.
  double tolerance = 1e-9;
  double armijo = 1e-4;
  /// Number of stored curvature pairs.
  int memory = 8;
};

struct BoxSolverResult {
  Eigen::VectorXd y;
  double value = 0.0;
  Eigen::VectorXd gradient;
  double projected_gradient = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Returns f(y) and writes the gradient into `grad`.
using SmoothObjective = std::function<double(const Eigen::VectorXd& y, Eigen::VectorXd& grad)>;

BoxSolverResult minimize_in_box(const SmoothObjective& objective, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper, const Eigen::VectorXd& start,
                                const BoxSolverOptions& options = {});

/// ||P(y - g) - y||_inf for the box [lower, upper].
double projected_gradient_norm(const Eigen::VectorXd& y, const Eigen::VectorXd& grad,
                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

}  // namespace rempc
