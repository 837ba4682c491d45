#pragma once

#include <optional>

#include <Eigen/Core>

#include "projsel/model_core.hpp"
#include "projsel/newton.hpp"

namespace projsel {

/// Independent Gaussian penalty on the natural (flatten() layout) parameters.
struct GaussianPrior {
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// Weighted log-likelihood  sum_i sum_y w_{i,y} log p(y | x_i, theta)  of a
/// cumulative or categorical submodel, optionally plus a Gaussian log prior.
///
/// The SmoothObjective interface works on unconstrained coordinates: for the
/// cumulative family the thresholds are (zeta_1, log(zeta_2 - zeta_1), ...),
/// which keeps them strictly increasing. The natural_* members work on the
/// flatten() layout directly.
class WeightedLikelihood final : public SmoothObjective {
 public:
  /// `design` is N x d, `weights` is N x J with nonnegative entries.
  WeightedLikelihood(FamilyKind family, const Link& link, Eigen::MatrixXd design,
                     Eigen::MatrixXd weights);

  FamilyKind family() const noexcept { return family_; }
  const Link& link() const noexcept { return link_; }
  int categories() const noexcept { return static_cast<int>(weights_.cols()); }
  int predictors() const noexcept { return static_cast<int>(design_.cols()); }
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::MatrixXd& weights() const noexcept { return weights_; }

  void set_prior(GaussianPrior prior);

  int dimension() const override;
  double value(const Eigen::VectorXd& u) const override;
  ObjectiveEvaluation evaluate(const Eigen::VectorXd& u, bool with_hessian) const override;
  double divergence_norm(const Eigen::VectorXd& u) const override;

  double natural_value(const Eigen::VectorXd& theta) const;
  ObjectiveEvaluation natural_evaluate(const Eigen::VectorXd& theta, bool with_hessian) const;

  Eigen::VectorXd to_natural(const Eigen::VectorXd& u) const;
  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta) const;

  /// Cumulative: thresholds from the weighted cumulative category frequencies
  /// mapped through g, zero coefficients. Categorical: all zeros. Natural layout.
  Eigen::VectorXd initial_point() const;

 private:
  ObjectiveEvaluation evaluate_cumulative(const Eigen::VectorXd& theta, bool with_hessian,
                                          bool with_gradient) const;
  ObjectiveEvaluation evaluate_categorical(const Eigen::VectorXd& theta, bool with_hessian,
                                           bool with_gradient) const;
  void add_prior(const Eigen::VectorXd& theta, ObjectiveEvaluation& ev, bool with_gradient,
                 bool with_hessian) const;

  FamilyKind family_;
  Link link_;
  Eigen::MatrixXd design_;
  Eigen::MatrixXd weights_;
  std::optional<GaussianPrior> prior_;
};

}  // namespace projsel
