#include <cmath>
#include <random>

#include <Eigen/Cholesky>

#include "projsel/errors.hpp"
#include "projsel/newton.hpp"
#include "projsel/simulation.hpp"
#include "projsel/weighted_likelihood.hpp"

namespace projsel {

namespace {

Eigen::MatrixXd one_hot(const Dataset& data) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(data.rows(), data.categories());
  for (int i = 0; i < data.rows(); ++i) w(i, data.y[static_cast<std::size_t>(i)] - 1) = 1.0;
  return w;
}

GaussianPrior working_prior(FamilyKind family, int J, int P, const ReferencePrior& prior) {
  const int dim = free_parameter_count(family, J, P);
  GaussianPrior out{Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Constant(dim, prior.coefficient_sd)};
  if (family == FamilyKind::cumulative) {
    out.sd.head(J - 1).setConstant(prior.intercept_sd);
  } else {
    for (int k = 0; k < J - 1; ++k) out.sd[k * (P + 1)] = prior.intercept_sd;
  }
  return out;
}

bool monotone(const Eigen::VectorXd& zeta) {
  for (Eigen::Index k = 1; k < zeta.size(); ++k)
    if (!(zeta[k] > zeta[k - 1])) return false;
  return true;
}

}  // namespace

LaplaceFit fit_reference_laplace_full(const Dataset& data, FamilyKind family, const Link& link,
                                      const ReferencePrior& prior, int draws,
                                      std::uint64_t seed) {
  data.validate();
  if (data.rows() == 0) throw DataError("cannot fit a reference model to an empty dataset");
  if (draws < 1) throw InvalidParameter("number of reference draws must be positive");
  if (!(prior.intercept_sd > 0.0) || !(prior.coefficient_sd > 0.0))
    throw InvalidParameter("prior scales must be positive");
  const int J = data.categories();
  const int P = data.cols();

  WeightedLikelihood objective(family, link, data.x, one_hot(data));
  objective.set_prior(working_prior(family, J, P, prior));
  NewtonResult newton;
  try {
    newton = maximize(objective, objective.to_unconstrained(objective.initial_point()));
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("reference mode search failed: ") + e.what(),
                         e.last_iterate(), e.gradient_norm());
  }
  const Eigen::VectorXd mode = objective.to_natural(newton.argmax);
  const ObjectiveEvaluation at_mode = objective.natural_evaluate(mode, true);
  const Eigen::MatrixXd precision = -at_mode.hessian;
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success)
    throw NumericalError("posterior precision at the mode is not positive definite", mode,
                         newton.gradient_norm);

  LaplaceFit fit;
  fit.mode = unflatten(family, J, P, mode);
  fit.iterations = newton.iterations;
  fit.covariance = llt.solve(Eigen::MatrixXd::Identity(mode.size(), mode.size()));
  fit.draws.predictor_names = data.column_names;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto upper = llt.matrixU();
  auto sample = [&] {
    Eigen::VectorXd z(mode.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
    // theta = mode + L^{-T} z has covariance (L L^T)^{-1}.
    return Eigen::VectorXd(mode + upper.solve(z));
  };

  const long max_attempts = 100L * draws + 1000L;
  long attempts = 0;
  if (family == FamilyKind::cumulative) {
    std::vector<CumulativeParams> out;
    out.reserve(static_cast<std::size_t>(draws));
    while (static_cast<int>(out.size()) < draws) {
      if (++attempts > max_attempts)
        throw NumericalError("too many reference draws with non-monotone thresholds", mode,
                             newton.gradient_norm);
      const Eigen::VectorXd theta = sample();
      if (!monotone(theta.head(J - 1))) {
        ++fit.rejected;
        continue;
      }
      out.push_back(std::get<CumulativeParams>(unflatten(family, J, P, theta)));
    }
    fit.draws.content = std::move(out);
  } else {
    std::vector<CategoricalParams> out;
    out.reserve(static_cast<std::size_t>(draws));
    for (int s = 0; s < draws; ++s)
      out.push_back(std::get<CategoricalParams>(unflatten(family, J, P, sample())));
    fit.draws.content = std::move(out);
  }
  return fit;
}

DrawSet fit_reference_laplace(const Dataset& data, FamilyKind family, const Link& link,
                              const ReferencePrior& prior, int draws, std::uint64_t seed) {
  return fit_reference_laplace_full(data, family, link, prior, draws, seed).draws;
}

}  // namespace projsel
