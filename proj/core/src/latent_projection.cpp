#include "projsel/latent_projection.hpp"

#include <numeric>

#include <Eigen/QR>

#include "projsel/errors.hpp"

namespace projsel {

LatentReference latent_reference(const Dataset& data, const DrawSet& draws,
                                 const ClusteredReference& clustered) {
  if (draws.kind() != DrawKind::cumulative_params)
    throw InvalidParameter("latent projection needs cumulative-params reference draws");
  const auto& params = draws.cumulative();
  if (static_cast<int>(params.size()) != clustered.draw_count)
    throw DataError("clustered reference and draw set disagree on the number of draws");

  std::vector<int> columns;
  for (const auto& name : draws.predictor_names) columns.push_back(data.column_index(name));
  const Eigen::MatrixXd X = data.columns(columns);

  const int C = clustered.clusters();
  LatentReference out;
  out.eta = Eigen::MatrixXd::Zero(C, data.rows());
  out.thresholds.resize(static_cast<std::size_t>(C));
  out.weights = clustered.weights;
  for (int c = 0; c < C; ++c) {
    const auto& members = clustered.members[static_cast<std::size_t>(c)];
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(params[0].thresholds.size());
    for (int s : members) {
      beta += params[static_cast<std::size_t>(s)].coefficients;
      zeta += params[static_cast<std::size_t>(s)].thresholds;
    }
    const double m = static_cast<double>(members.size());
    // eta is linear in beta, so the mean of x'beta_s is x' mean(beta_s).
    out.eta.row(c) = (X * (beta / m)).transpose();
    out.thresholds[static_cast<std::size_t>(c)] = zeta / m;
  }
  return out;
}

double LatentProjectedSubmodel::weighted_rss() const {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double out = 0.0;
  for (std::size_t c = 0; c < rss.size(); ++c) out += weights[c] / total * rss[c];
  return out;
}

LatentProjectedSubmodel latent_project(const Dataset& data, const LatentReference& reference,
                                       const std::vector<int>& subset) {
  if (reference.eta.cols() != data.rows())
    throw DataError("latent reference does not match the dataset size");
  LatentProjectedSubmodel out;
  out.subset = subset;
  for (int col : subset) {
    if (col < 0 || col >= data.cols())
      throw DataError("unknown predictor column index " + std::to_string(col));
    out.subset_names.push_back(data.column_names[static_cast<std::size_t>(col)]);
  }
  out.thresholds = reference.thresholds;
  out.weights = reference.weights;

  const Eigen::MatrixXd X = data.columns(subset);
  const int C = reference.clusters();
  out.coefficients.resize(static_cast<std::size_t>(C));
  out.rss.resize(static_cast<std::size_t>(C));
  if (X.cols() == 0) {
    for (int c = 0; c < C; ++c) {
      out.coefficients[static_cast<std::size_t>(c)] = Eigen::VectorXd::Zero(0);
      out.rss[static_cast<std::size_t>(c)] = reference.eta.row(c).squaredNorm();
    }
    return out;
  }

  // One decomposition serves every cluster.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X);
  out.rank_deficient = cod.rank() < X.cols();
  const Eigen::MatrixXd targets = reference.eta.transpose();  // N x C
  const Eigen::MatrixXd beta = cod.solve(targets);            // d x C
  const Eigen::MatrixXd residual = targets - X * beta;
  for (int c = 0; c < C; ++c) {
    out.coefficients[static_cast<std::size_t>(c)] = beta.col(c);
    out.rss[static_cast<std::size_t>(c)] = residual.col(c).squaredNorm();
  }
  return out;
}

LatentProjectedSubmodel latent_project(const Dataset& data, const DrawSet& draws,
                                       const ClusteredReference& clustered,
                                       const std::vector<int>& subset) {
  return latent_project(data, latent_reference(data, draws, clustered), subset);
}

Eigen::MatrixXd latent_predict_response(const LatentProjectedSubmodel& lat,
                                        const Dataset& newdata, const Link& link) {
  if (lat.coefficients.empty()) throw InvalidParameter("latent submodel has no clusters");
  std::vector<int> columns;
  for (const auto& name : lat.subset_names) columns.push_back(newdata.column_index(name));
  const Eigen::MatrixXd X = newdata.columns(columns);

  const double total = std::accumulate(lat.weights.begin(), lat.weights.end(), 0.0);
  const int J = static_cast<int>(lat.thresholds[0].size()) + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(X.rows(), J);
  for (std::size_t c = 0; c < lat.coefficients.size(); ++c) {
    const CumulativeParams params{lat.thresholds[c], lat.coefficients[c]};
    const double w = lat.weights[c] / total;
    const Eigen::VectorXd eta = X * lat.coefficients[c];
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      out.row(i) += w * cumulative_pmf(params, link, eta[i]).transpose();
  }
  return out;
}

}  // namespace projsel
