#pragma once

// Latent-space baseline: submodel coefficients are least-squares fits to the
// cluster-mean reference latent predictor; response-scale probabilities reuse
// the cluster-mean reference thresholds.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "projsel/model_core.hpp"
#include "projsel/reference.hpp"

namespace projsel {

/// Cluster-level latent targets extracted once from cumulative draws.
struct LatentReference {
  Eigen::MatrixXd eta;                     // C x N cluster-mean latent predictors
  std::vector<Eigen::VectorXd> thresholds; // per cluster, mean of member thresholds
  std::vector<double> weights;             // |I*_c|

  int clusters() const { return static_cast<int>(eta.rows()); }
};

/// Throws InvalidParameter unless the draws are cumulative-params.
LatentReference latent_reference(const Dataset& data, const DrawSet& draws,
                                 const ClusteredReference& clustered);

struct LatentProjectedSubmodel {
  std::vector<int> subset;
  std::vector<std::string> subset_names;
  std::vector<Eigen::VectorXd> coefficients;  // per cluster
  std::vector<Eigen::VectorXd> thresholds;    // per cluster, reference zeta*_c
  std::vector<double> weights;
  std::vector<double> rss;                    // per-cluster residual sum of squares
  bool rank_deficient = false;                // minimum-norm solution was used

  int clusters() const { return static_cast<int>(coefficients.size()); }
  double weighted_rss() const;
};

LatentProjectedSubmodel latent_project(const Dataset& data, const LatentReference& reference,
                                       const std::vector<int>& subset);

LatentProjectedSubmodel latent_project(const Dataset& data, const DrawSet& draws,
                                       const ClusteredReference& clustered,
                                       const std::vector<int>& subset);

/// Cluster-weight mixture of cumulative pmfs with (zeta*_c, x' beta_c). N_new x J.
Eigen::MatrixXd latent_predict_response(const LatentProjectedSubmodel& lat,
                                        const Dataset& newdata, const Link& link);

}  // namespace projsel
