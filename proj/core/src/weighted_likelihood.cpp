#include "projsel/weighted_likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projsel/errors.hpp"

namespace projsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLogFloor = std::log(kProbabilityFloor);

}  // namespace

WeightedLikelihood::WeightedLikelihood(FamilyKind family, const Link& link,
                                       Eigen::MatrixXd design, Eigen::MatrixXd weights)
    : family_(family), link_(link), design_(std::move(design)), weights_(std::move(weights)) {
  if (design_.rows() != weights_.rows())
    throw DataError("design and weight matrices disagree on the number of observations");
  if (weights_.cols() < 2) throw DataError("weighted likelihood needs at least 2 categories");
  if ((weights_.array() < 0.0).any() || !weights_.allFinite())
    throw DataError("augmented weights must be finite and nonnegative");
  if (!design_.allFinite()) throw DataError("design matrix contains non-finite values");
}

void WeightedLikelihood::set_prior(GaussianPrior prior) {
  if (prior.mean.size() != dimension() || prior.sd.size() != dimension())
    throw InvalidParameter("prior dimension does not match the parameter vector");
  if ((prior.sd.array() <= 0.0).any()) throw InvalidParameter("prior sd must be positive");
  prior_ = std::move(prior);
}

int WeightedLikelihood::dimension() const {
  return free_parameter_count(family_, categories(), predictors());
}

Eigen::VectorXd WeightedLikelihood::to_natural(const Eigen::VectorXd& u) const {
  if (family_ == FamilyKind::categorical) return u;
  Eigen::VectorXd theta = u;
  const int K = categories() - 1;
  for (int k = 1; k < K; ++k) theta[k] = theta[k - 1] + std::exp(u[k]);
  return theta;
}

Eigen::VectorXd WeightedLikelihood::to_unconstrained(const Eigen::VectorXd& theta) const {
  if (family_ == FamilyKind::categorical) return theta;
  Eigen::VectorXd u = theta;
  const int K = categories() - 1;
  for (int k = 1; k < K; ++k) {
    const double gap = theta[k] - theta[k - 1];
    if (!(gap > 0.0)) throw InvalidParameter("thresholds are not strictly increasing");
    u[k] = std::log(gap);
  }
  return u;
}

double WeightedLikelihood::divergence_norm(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd theta = to_natural(u);
  return theta.size() == 0 ? 0.0 : theta.lpNorm<Eigen::Infinity>();
}

Eigen::VectorXd WeightedLikelihood::initial_point() const {
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(dimension());
  if (family_ == FamilyKind::categorical) return theta;

  const int J = categories();
  const Eigen::RowVectorXd totals = weights_.colwise().sum();
  const double all = totals.sum();
  double cumulative = 0.0;
  for (int j = 0; j < J - 1; ++j) {
    cumulative += all > 0.0 ? totals[j] / all : 1.0 / J;
    const double p = std::clamp(cumulative, 1e-6, 1.0 - 1e-6);
    theta[j] = link_.forward(p);
    if (j > 0) theta[j] = std::max(theta[j], theta[j - 1] + 1e-3);
  }
  return theta;
}

void WeightedLikelihood::add_prior(const Eigen::VectorXd& theta, ObjectiveEvaluation& ev,
                                   bool with_gradient, bool with_hessian) const {
  if (!prior_) return;
  const Eigen::ArrayXd z = (theta - prior_->mean).array() / prior_->sd.array();
  ev.value -= 0.5 * z.square().sum();
  if (with_gradient) ev.gradient.array() -= z / prior_->sd.array();
  if (with_hessian) ev.hessian.diagonal().array() -= prior_->sd.array().square().inverse();
}

ObjectiveEvaluation WeightedLikelihood::evaluate_cumulative(const Eigen::VectorXd& theta,
                                                            bool with_hessian,
                                                            bool with_gradient) const {
  const int J = categories();
  const int K = J - 1;
  const int d = predictors();
  const Eigen::Index N = design_.rows();
  const auto zeta = theta.head(K);
  const auto beta = theta.tail(d);

  ObjectiveEvaluation ev;
  for (int k = 1; k < K; ++k) {
    if (!(zeta[k] > zeta[k - 1])) {
      ev.value = -kInf;
      return ev;
    }
  }

  const Eigen::VectorXd eta = d > 0 ? Eigen::VectorXd(design_ * beta) : Eigen::VectorXd::Zero(N);
  Eigen::VectorXd grad_zeta = Eigen::VectorXd::Zero(K);
  Eigen::VectorXd grad_eta(N);
  Eigen::MatrixXd h_zeta = Eigen::MatrixXd::Zero(K, K);
  Eigen::VectorXd h_eta(N);
  Eigen::MatrixXd h_cross(N, K);  // d^2 / d zeta_k d eta_i

  double value = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    double g_eta = 0.0;
    double hh_eta = 0.0;
    if (with_hessian) h_cross.row(i).setZero();
    for (int j = 0; j < J; ++j) {
      const double w = weights_(i, j);
      if (w == 0.0) continue;
      const double a = j < K ? zeta[j] - eta[i] : kInf;
      const double b = j > 0 ? zeta[j - 1] - eta[i] : -kInf;
      const double prob = link_.interval(b, a);
      if (!(prob >= kProbabilityFloor)) {
        value += w * kLogFloor;
        continue;
      }
      value += w * std::log(prob);
      if (!with_gradient) continue;

      const double ga = link_.density(a) / prob;
      const double gb = -link_.density(b) / prob;
      if (j < K) grad_zeta[j] += w * ga;
      if (j > 0) grad_zeta[j - 1] += w * gb;
      g_eta -= w * (ga + gb);

      if (!with_hessian) continue;
      const double haa = link_.density_slope(a) / prob - ga * ga;
      const double hbb = -link_.density_slope(b) / prob - gb * gb;
      const double hab = -ga * gb;
      if (j < K) h_zeta(j, j) += w * haa;
      if (j > 0) h_zeta(j - 1, j - 1) += w * hbb;
      if (j > 0 && j < K) {
        h_zeta(j, j - 1) += w * hab;
        h_zeta(j - 1, j) += w * hab;
      }
      hh_eta += w * (haa + 2.0 * hab + hbb);
      if (j < K) h_cross(i, j) -= w * (haa + hab);
      if (j > 0) h_cross(i, j - 1) -= w * (hab + hbb);
    }
    grad_eta[i] = g_eta;
    h_eta[i] = hh_eta;
  }

  ev.value = value;
  if (!with_gradient) return ev;
  ev.gradient.resize(K + d);
  ev.gradient.head(K) = grad_zeta;
  if (d > 0) ev.gradient.tail(d) = design_.transpose() * grad_eta;
  if (!with_hessian) return ev;

  ev.hessian.resize(K + d, K + d);
  ev.hessian.topLeftCorner(K, K) = h_zeta;
  if (d > 0) {
    const Eigen::MatrixXd cross = h_cross.transpose() * design_;  // K x d
    ev.hessian.topRightCorner(K, d) = cross;
    ev.hessian.bottomLeftCorner(d, K) = cross.transpose();
    ev.hessian.bottomRightCorner(d, d) =
        design_.transpose() * h_eta.asDiagonal() * design_;
  }
  return ev;
}

ObjectiveEvaluation WeightedLikelihood::evaluate_categorical(const Eigen::VectorXd& theta,
                                                             bool with_hessian,
                                                             bool with_gradient) const {
  const int J = categories();
  const int d = predictors();
  const int block = d + 1;
  const Eigen::Index N = design_.rows();

  // Linear predictors for categories 2..J (category 1 is pinned at zero).
  Eigen::MatrixXd coef(block, J - 1);
  for (int k = 0; k < J - 1; ++k) coef.col(k) = theta.segment(k * block, block);
  Eigen::MatrixXd lin(N, J - 1);
  lin = design_ * coef.bottomRows(d);
  lin.rowwise() += coef.row(0);

  ObjectiveEvaluation ev;
  Eigen::MatrixXd resid(N, J - 1);        // sum_j w_ij (e_j - p)_k over unclamped j
  Eigen::MatrixXd probs(N, J - 1);
  Eigen::VectorXd active_weight(N);
  double value = 0.0;
  Eigen::VectorXd logp(J);
  for (Eigen::Index i = 0; i < N; ++i) {
    double top = 0.0;
    for (int k = 0; k < J - 1; ++k) top = std::max(top, lin(i, k));
    double sum = std::exp(-top);
    for (int k = 0; k < J - 1; ++k) sum += std::exp(lin(i, k) - top);
    const double lse = top + std::log(sum);
    logp[0] = -lse;
    for (int k = 0; k < J - 1; ++k) logp[k + 1] = lin(i, k) - lse;

    double active = 0.0;
    resid.row(i).setZero();
    for (int j = 0; j < J; ++j) {
      const double w = weights_(i, j);
      if (w == 0.0) continue;
      if (logp[j] < kLogFloor) {
        value += w * kLogFloor;
        continue;
      }
      value += w * logp[j];
      active += w;
      if (j > 0) resid(i, j - 1) += w;
    }
    for (int k = 0; k < J - 1; ++k) {
      probs(i, k) = std::exp(logp[k + 1]);
      resid(i, k) -= active * probs(i, k);
    }
    active_weight[i] = active;
  }
  ev.value = value;
  if (!with_gradient) return ev;

  const int dim = (J - 1) * block;
  ev.gradient.resize(dim);
  for (int k = 0; k < J - 1; ++k) {
    ev.gradient[k * block] = resid.col(k).sum();
    if (d > 0) ev.gradient.segment(k * block + 1, d) = design_.transpose() * resid.col(k);
  }
  if (!with_hessian) return ev;

  Eigen::MatrixXd Z(N, block);
  Z.col(0).setOnes();
  if (d > 0) Z.rightCols(d) = design_;
  ev.hessian.resize(dim, dim);
  for (int k = 0; k < J - 1; ++k) {
    for (int l = k; l < J - 1; ++l) {
      Eigen::VectorXd v = -active_weight.cwiseProduct(probs.col(k));
      if (k == l)
        v = v.cwiseProduct(Eigen::VectorXd::Ones(N) - probs.col(k));
      else
        v = -v.cwiseProduct(probs.col(l));
      const Eigen::MatrixXd blk = Z.transpose() * v.asDiagonal() * Z;
      ev.hessian.block(k * block, l * block, block, block) = blk;
      if (l != k) ev.hessian.block(l * block, k * block, block, block) = blk.transpose();
    }
  }
  return ev;
}

double WeightedLikelihood::natural_value(const Eigen::VectorXd& theta) const {
  ObjectiveEvaluation ev = family_ == FamilyKind::cumulative
                               ? evaluate_cumulative(theta, false, false)
                               : evaluate_categorical(theta, false, false);
  if (std::isfinite(ev.value)) add_prior(theta, ev, false, false);
  return ev.value;
}

ObjectiveEvaluation WeightedLikelihood::natural_evaluate(const Eigen::VectorXd& theta,
                                                         bool with_hessian) const {
  if (theta.size() != dimension())
    throw InvalidParameter("parameter vector has the wrong dimension");
  ObjectiveEvaluation ev = family_ == FamilyKind::cumulative
                               ? evaluate_cumulative(theta, with_hessian, true)
                               : evaluate_categorical(theta, with_hessian, true);
  if (std::isfinite(ev.value)) add_prior(theta, ev, true, with_hessian);
  return ev;
}

double WeightedLikelihood::value(const Eigen::VectorXd& u) const {
  return natural_value(to_natural(u));
}

ObjectiveEvaluation WeightedLikelihood::evaluate(const Eigen::VectorXd& u,
                                                 bool with_hessian) const {
  const Eigen::VectorXd theta = to_natural(u);
  ObjectiveEvaluation ev = natural_evaluate(theta, with_hessian);
  if (family_ == FamilyKind::categorical || !std::isfinite(ev.value)) return ev;

  // Chain rule through zeta_k = u_0 + sum_{m=1..k} exp(u_m).
  const int K = categories() - 1;
  const int dim = dimension();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(dim, dim);
  for (int k = 0; k < K; ++k) {
    for (int m = 1; m <= k; ++m) T(k, m) = std::exp(u[m]);
    T(k, 0) = 1.0;
  }
  const Eigen::VectorXd natural_gradient = ev.gradient;
  ev.gradient = T.transpose() * natural_gradient;
  if (with_hessian) {
    ev.hessian = T.transpose() * ev.hessian * T;
    for (int m = 1; m < K; ++m)
      ev.hessian(m, m) += std::exp(u[m]) * natural_gradient.segment(m, K - m).sum();
  }
  return ev;
}

}  // namespace projsel
