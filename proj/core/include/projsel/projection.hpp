#pragma once

// Augmented-data projection: for every cluster c the submodel parameters
// maximize  sum_i sum_y a*_{c,i,y} log p(y | x_i, theta),  i.e. weighted
// maximum likelihood on a dataset where each observation is repeated once
// per response category.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "projsel/model_core.hpp"
#include "projsel/newton.hpp"
#include "projsel/reference.hpp"

namespace projsel {

struct AugmentedRow {
  int observation;  // 0-based i
  int response;     // 1-based category
  double weight;    // a*_{c,i,response}
};

/// N * J rows arranged as J blocks of N rows (block y holds response y for
/// every observation). Predictor sub-vectors are shared across blocks.
class AugmentedDataset {
 public:
  /// `design` is N x |subset|, `probs` the N x J matrix a*_{c,.,.}.
  AugmentedDataset(Eigen::MatrixXd design, const Eigen::MatrixXd& probs);

  int observations() const noexcept { return static_cast<int>(design_.rows()); }
  int categories() const noexcept { return categories_; }
  int predictors() const noexcept { return static_cast<int>(design_.cols()); }
  std::size_t row_count() const noexcept { return weights_.size(); }

  AugmentedRow row(std::size_t r) const;
  Eigen::VectorXd predictors_of(std::size_t r) const;
  double weight(int observation, int response) const;

  const Eigen::MatrixXd& design() const noexcept { return design_; }
  /// N x J view of the weights.
  Eigen::MatrixXd weight_matrix() const;

 private:
  Eigen::MatrixXd design_;
  int categories_;
  std::vector<double> weights_;  // index (response - 1) * N + observation
};

AugmentedDataset build_augmented(const Dataset& data, const ClusteredReference& clustered,
                                 int cluster, const std::vector<int>& subset);

struct ClusterFit {
  ModelParams params;
  double objective = 0.0;      // attained weighted log-likelihood
  double mean_kl = 0.0;        // (1/N) sum_i KL(a*_i || p_hat_i)
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> trace;   // objective per accepted Newton step
};

/// Weighted ML fit on one augmented dataset. Throws NumericalError on
/// non-convergence or separation.
ClusterFit project_cluster(const AugmentedDataset& aug, FamilyKind family, const Link& link,
                           const NewtonOptions& options = {});

struct ProjectedSubmodel {
  FamilyKind family = FamilyKind::cumulative;
  LinkKind link = LinkKind::probit;
  std::vector<int> subset;                // dataset column positions, in order
  std::vector<std::string> subset_names;
  std::vector<ModelParams> params;        // one per cluster
  std::vector<double> weights;            // |I*_c|
  std::vector<double> objective;
  std::vector<double> mean_kl;

  int clusters() const { return static_cast<int>(params.size()); }
  /// Cluster-weighted total objective used by the forward search.
  double weighted_objective() const;
};

ProjectedSubmodel project(const Dataset& data, const ClusteredReference& clustered,
                          const std::vector<int>& subset, FamilyKind family, const Link& link,
                          const NewtonOptions& options = {});

/// Projects each draw separately (no clustering).
ProjectedSubmodel project_draw_by_draw(const Dataset& data, const DrawSet& draws,
                                       const std::vector<int>& subset, FamilyKind family,
                                       const Link& link, const NewtonOptions& options = {});

/// Cluster-weight mixture of the per-cluster pmfs on `newdata`, whose
/// columns are looked up by name. N_new x J.
Eigen::MatrixXd submodel_predict(const ProjectedSubmodel& proj, const Dataset& newdata);

/// (1/N) sum_i sum_y a log(a / p) with 0 log 0 = 0 and p floored at 1e-300.
double mean_kl_divergence(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& fitted);

/// N x J fitted probabilities of one parameter vector on a design matrix.
Eigen::MatrixXd fitted_probabilities(const ModelParams& params, const Link& link,
                                     const Eigen::MatrixXd& design);

}  // namespace projsel
