#pragma once

#include <vector>

#include <Eigen/Core>

namespace projsel {

struct ObjectiveEvaluation {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;  // empty when not requested
};

/// Twice-differentiable objective to be maximized.
class SmoothObjective {
 public:
  virtual ~SmoothObjective() = default;
  virtual int dimension() const = 0;
  /// Objective value; -inf outside the domain.
  virtual double value(const Eigen::VectorXd& u) const = 0;
  virtual ObjectiveEvaluation evaluate(const Eigen::VectorXd& u, bool with_hessian) const = 0;
  /// Norm used for the divergence guard (defaults to the sup norm of u).
  virtual double divergence_norm(const Eigen::VectorXd& u) const;
};

struct NewtonOptions {
  double gradient_tolerance = 1e-8;
  double relative_tolerance = 1e-12;
  int max_iterations = 100;
  double armijo = 1e-4;
  double divergence_bound = 1e6;
};

struct NewtonResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  /// Objective value after every accepted step, starting with the initial point.
  std::vector<double> trace;
  /// True when at least one step used an eigenvalue-shifted Hessian.
  bool shifted = false;
};

/// Damped Newton ascent: exact Hessian, Armijo backtracking by halving, and an
/// eigenvalue shift when the Hessian is not negative definite. Throws
/// NumericalError on non-convergence or when the iterate diverges.
NewtonResult maximize(const SmoothObjective& objective, Eigen::VectorXd start,
                      const NewtonOptions& options = {});

}  // namespace projsel
