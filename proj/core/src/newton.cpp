#include "projsel/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "projsel/errors.hpp"

namespace projsel {

double SmoothObjective::divergence_norm(const Eigen::VectorXd& u) const {
  return u.size() == 0 ? 0.0 : u.lpNorm<Eigen::Infinity>();
}

namespace {

double sup_norm(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>();
}

// Solves (-H) d = g, shifting -H to positive definite when needed.
Eigen::VectorXd ascent_direction(const ObjectiveEvaluation& ev, bool& shifted) {
  const Eigen::Index n = ev.gradient.size();
  Eigen::MatrixXd A = -ev.hessian;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) {
    Eigen::VectorXd d = llt.solve(ev.gradient);
    if (d.allFinite()) return d;
  }
  shifted = true;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  if (eig.info() != Eigen::Success) return ev.gradient;
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = std::abs(eig.eigenvalues().maxCoeff());
  const double shift = std::max(0.0, -lo) + 1e-8 * std::max(1.0, hi);
  A.diagonal().array() += shift;
  Eigen::LLT<Eigen::MatrixXd> shifted_llt(A);
  if (shifted_llt.info() != Eigen::Success) return ev.gradient;
  Eigen::VectorXd d = shifted_llt.solve(ev.gradient);
  return d.allFinite() && n > 0 ? d : ev.gradient;
}

}  // namespace

NewtonResult maximize(const SmoothObjective& objective, Eigen::VectorXd start,
                      const NewtonOptions& options) {
  NewtonResult result;
  Eigen::VectorXd u = std::move(start);
  ObjectiveEvaluation ev = objective.evaluate(u, true);
  if (!std::isfinite(ev.value))
    throw NumericalError("objective is not finite at the starting point", u,
                         std::numeric_limits<double>::infinity());
  result.trace.push_back(ev.value);

  double relative_change = std::numeric_limits<double>::infinity();
  const double eps = std::numeric_limits<double>::epsilon();
  // Once the stopping rule holds, one more full Newton step (accepted like a
  // step in the noise regime) takes the iterate from the tolerance to near
  // machine precision at the cost of a single evaluation.
  bool polishing = false;
  for (int iter = 0;; ++iter) {
    const double gnorm = sup_norm(ev.gradient);
    const bool first = iter == 0;
    const bool converged = gnorm <= options.gradient_tolerance &&
                           (first || relative_change <= options.relative_tolerance);
    if (converged && (polishing || gnorm == 0.0)) {
      result.gradient_norm = gnorm;
      break;
    }
    polishing = converged;
    if (iter >= options.max_iterations) {
      if (gnorm <= options.gradient_tolerance) {
        result.gradient_norm = gnorm;
        break;
      }
      throw NumericalError("Newton solver did not converge in " +
                               std::to_string(options.max_iterations) +
                               " iterations (gradient norm " + std::to_string(gnorm) + ")",
                           u, gnorm);
    }

    Eigen::VectorXd direction = ascent_direction(ev, result.shifted);
    double slope = ev.gradient.dot(direction);
    if (!(slope > 0.0)) {
      direction = ev.gradient;
      slope = ev.gradient.squaredNorm();
    }

    // Near the optimum the predicted gain drowns in the rounding noise of the
    // objective, so the line search cannot tell progress from noise. The full
    // Newton step is then taken if the value stays within that noise and the
    // gradient shrinks; otherwise the iterate is optimal to working precision.
    const double noise = 64.0 * eps * std::max(1.0, std::abs(ev.value));
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_value = -std::numeric_limits<double>::infinity();
    if (slope <= noise || polishing) {
      candidate = u + direction;
      candidate_value = objective.value(candidate);
      bool improves = false;
      if (std::isfinite(candidate_value) && candidate_value >= ev.value - noise) {
        const ObjectiveEvaluation probe = objective.evaluate(candidate, false);
        improves = candidate_value > ev.value || sup_norm(probe.gradient) < gnorm;
      }
      if (!improves) {
        result.gradient_norm = gnorm;
        break;
      }
      accepted = true;
    }
    for (int halving = 0; !accepted && halving < 60; ++halving) {
      candidate = u + step * direction;
      candidate_value = objective.value(candidate);
      if (std::isfinite(candidate_value) &&
          candidate_value >= ev.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (gnorm <= options.gradient_tolerance || slope <= noise) {
        result.gradient_norm = gnorm;
        break;
      }
      throw NumericalError("line search failed (gradient norm " + std::to_string(gnorm) + ")",
                           u, gnorm);
    }

    ObjectiveEvaluation next = objective.evaluate(candidate, true);
    relative_change = std::abs(next.value - ev.value) / std::max(1.0, std::abs(ev.value));
    u = std::move(candidate);
    ev = std::move(next);
    result.trace.push_back(ev.value);
    result.iterations = iter + 1;

    if (objective.divergence_norm(u) > options.divergence_bound)
      throw NumericalError("parameters diverge (sup norm above " +
                               std::to_string(options.divergence_bound) +
                               "); the weighted data are likely separated",
                           u, sup_norm(ev.gradient));
  }

  result.argmax = std::move(u);
  result.value = ev.value;
  return result;
}

}  // namespace projsel
