#include "projsel/projection.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"
#include "projsel/weighted_likelihood.hpp"

namespace projsel {

AugmentedDataset::AugmentedDataset(Eigen::MatrixXd design, const Eigen::MatrixXd& probs)
    : design_(std::move(design)), categories_(static_cast<int>(probs.cols())) {
  if (probs.rows() != design_.rows())
    throw DataError("augmented dataset: probabilities and design disagree on N");
  const Eigen::Index N = design_.rows();
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto r = probs.row(i);
    if (!r.allFinite() || (r.array() < 0.0).any() || std::abs(r.sum() - 1.0) > 1e-8)
      throw DataError("augmented dataset: weights of observation " + std::to_string(i + 1) +
                      " are not a probability vector");
  }
  weights_.resize(static_cast<std::size_t>(N) * static_cast<std::size_t>(categories_));
  for (int y = 0; y < categories_; ++y)
    for (Eigen::Index i = 0; i < N; ++i)
      weights_[static_cast<std::size_t>(y) * static_cast<std::size_t>(N) +
               static_cast<std::size_t>(i)] = probs(i, y);
}

AugmentedRow AugmentedDataset::row(std::size_t r) const {
  const auto N = static_cast<std::size_t>(observations());
  return {static_cast<int>(r % N), static_cast<int>(r / N) + 1, weights_[r]};
}

Eigen::VectorXd AugmentedDataset::predictors_of(std::size_t r) const {
  return design_.row(static_cast<Eigen::Index>(r % static_cast<std::size_t>(observations())))
      .transpose();
}

double AugmentedDataset::weight(int observation, int response) const {
  return weights_[static_cast<std::size_t>(response - 1) *
                      static_cast<std::size_t>(observations()) +
                  static_cast<std::size_t>(observation)];
}

Eigen::MatrixXd AugmentedDataset::weight_matrix() const {
  return Eigen::Map<const Eigen::MatrixXd>(weights_.data(), observations(), categories_);
}

AugmentedDataset build_augmented(const Dataset& data, const ClusteredReference& clustered,
                                 int cluster, const std::vector<int>& subset) {
  if (cluster < 0 || cluster >= clustered.clusters())
    throw InvalidParameter("cluster index out of range");
  if (clustered.probs.observations() != data.rows())
    throw DataError("reference probabilities do not match the dataset size");
  return AugmentedDataset(data.columns(subset), clustered.cluster_probs(cluster));
}

Eigen::MatrixXd fitted_probabilities(const ModelParams& params, const Link& link,
                                     const Eigen::MatrixXd& design) {
  const int J = categories_of(params);
  Eigen::MatrixXd out(design.rows(), J);
  for (Eigen::Index i = 0; i < design.rows(); ++i)
    out.row(i) = pmf(params, link, design.row(i).transpose()).transpose();
  return out;
}

double mean_kl_divergence(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& fitted) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < reference.rows(); ++i) {
    for (Eigen::Index j = 0; j < reference.cols(); ++j) {
      const double a = reference(i, j);
      if (a == 0.0) continue;
      total += a * (std::log(a) - std::log(std::max(fitted(i, j), kProbabilityFloor)));
    }
  }
  return total / static_cast<double>(reference.rows());
}

ClusterFit project_cluster(const AugmentedDataset& aug, FamilyKind family, const Link& link,
                           const NewtonOptions& options) {
  const Eigen::MatrixXd weights = aug.weight_matrix();
  const int J = aug.categories();
  if (family == FamilyKind::cumulative && J < 2)
    throw InvalidParameter("cumulative projection needs at least 2 categories");
  WeightedLikelihood objective(family, link, aug.design(), weights);
  const Eigen::VectorXd start = objective.to_unconstrained(objective.initial_point());
  const NewtonResult newton = maximize(objective, start, options);
  const Eigen::VectorXd theta = objective.to_natural(newton.argmax);

  // The objective is concave in the natural parameters. If it is no worse at
  // sup norm `divergence_bound` along the ray from the starting point through
  // the solution, the supremum is only approached as the parameters diverge
  // (separated weights); the small gradient there is not an optimum.
  const Eigen::VectorXd origin = objective.initial_point();
  const Eigen::VectorXd ray = theta - origin;
  const double reach = ray.size() ? ray.lpNorm<Eigen::Infinity>() : 0.0;
  if (reach > 0.0) {
    const Eigen::VectorXd far = origin + (options.divergence_bound / reach) * ray;
    const double far_value = objective.natural_value(far);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, std::abs(newton.value));
    if (std::isfinite(far_value) && far_value >= newton.value - noise)
      throw NumericalError("parameters diverge (objective still improving at sup norm " +
                               std::to_string(options.divergence_bound) +
                               "); the weighted data are likely separated",
                           newton.argmax, newton.gradient_norm);
  }

  ClusterFit fit;
  fit.params = unflatten(family, J, aug.predictors(), theta);
  fit.objective = newton.value;
  fit.iterations = newton.iterations;
  fit.gradient_norm = newton.gradient_norm;
  fit.trace = newton.trace;
  fit.mean_kl = mean_kl_divergence(weights, fitted_probabilities(fit.params, link, aug.design()));
  return fit;
}

double ProjectedSubmodel::weighted_objective() const {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double out = 0.0;
  for (std::size_t c = 0; c < objective.size(); ++c) out += weights[c] / total * objective[c];
  return out;
}

ProjectedSubmodel project(const Dataset& data, const ClusteredReference& clustered,
                          const std::vector<int>& subset, FamilyKind family, const Link& link,
                          const NewtonOptions& options) {
  const int C = clustered.clusters();
  ProjectedSubmodel out;
  out.family = family;
  out.link = link.kind();
  out.subset = subset;
  for (int col : subset) {
    if (col < 0 || col >= data.cols())
      throw DataError("unknown predictor column index " + std::to_string(col));
    out.subset_names.push_back(data.column_names[static_cast<std::size_t>(col)]);
  }
  out.weights = clustered.weights;

  const Eigen::MatrixXd design = data.columns(subset);
  std::vector<ClusterFit> fits(static_cast<std::size_t>(C));
  parallel_for(fits.size(), [&](std::size_t c) {
    try {
      AugmentedDataset aug(design, clustered.cluster_probs(static_cast<int>(c)));
      fits[c] = project_cluster(aug, family, link, options);
    } catch (const NumericalError& e) {
      throw NumericalError("cluster " + std::to_string(c + 1) + ": " + e.what(),
                           e.last_iterate(), e.gradient_norm());
    }
  });

  for (auto& fit : fits) {
    out.params.push_back(std::move(fit.params));
    out.objective.push_back(fit.objective);
    out.mean_kl.push_back(fit.mean_kl);
  }
  return out;
}

ProjectedSubmodel project_draw_by_draw(const Dataset& data, const DrawSet& draws,
                                       const std::vector<int>& subset, FamilyKind family,
                                       const Link& link, const NewtonOptions& options) {
  const ProbabilityTensor tensor = predictive_tensor(draws, data, link);
  return project(data, thin_draws(tensor, tensor.draws()), subset, family, link, options);
}

Eigen::MatrixXd submodel_predict(const ProjectedSubmodel& proj, const Dataset& newdata) {
  if (proj.params.empty()) throw InvalidParameter("projected submodel has no clusters");
  std::vector<int> columns;
  columns.reserve(proj.subset_names.size());
  for (const auto& name : proj.subset_names) columns.push_back(newdata.column_index(name));
  const Eigen::MatrixXd design = newdata.columns(columns);
  const Link link(proj.link);

  const double total = std::accumulate(proj.weights.begin(), proj.weights.end(), 0.0);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(design.rows(), categories_of(proj.params[0]));
  for (std::size_t c = 0; c < proj.params.size(); ++c)
    out += (proj.weights[c] / total) * fitted_probabilities(proj.params[c], link, design);
  return out;
}

}  // namespace projsel
