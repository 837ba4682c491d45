#pragma once

// Reference-model posterior draws, their predictive probabilities and the
// clustered (or thinned) restricted posterior predictive a*_{c,i,y}.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "projsel/model_core.hpp"

namespace projsel {

/// Dense draws x observations x categories tensor; categories are contiguous.
class ProbabilityTensor {
 public:
  ProbabilityTensor() = default;
  ProbabilityTensor(int draws, int observations, int categories, double fill = 0.0);

  int draws() const noexcept { return draws_; }
  int observations() const noexcept { return observations_; }
  int categories() const noexcept { return categories_; }

  double& operator()(int s, int i, int j) { return data_[index(s, i, j)]; }
  double operator()(int s, int i, int j) const { return data_[index(s, i, j)]; }

  Eigen::Map<const Eigen::VectorXd> row(int s, int i) const {
    return {data_.data() + index(s, i, 0), categories_};
  }
  Eigen::Map<Eigen::VectorXd> row(int s, int i) {
    return {data_.data() + index(s, i, 0), categories_};
  }

  /// N x J matrix of draw s.
  Eigen::MatrixXd slice(int s) const;
  /// N x J average over all draws.
  Eigen::MatrixXd mean() const;

  const std::vector<double>& data() const noexcept { return data_; }

 private:
  std::size_t index(int s, int i, int j) const {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(observations_) +
            static_cast<std::size_t>(i)) * static_cast<std::size_t>(categories_) +
           static_cast<std::size_t>(j);
  }

  int draws_ = 0;
  int observations_ = 0;
  int categories_ = 0;
  std::vector<double> data_;
};

enum class DrawKind { cumulative_params, categorical_params, prob_tensor };

std::string_view to_string(DrawKind kind);
DrawKind parse_draw_kind(std::string_view name);

/// Posterior draws of the reference model: either full-model parameters of a
/// known family, or a family-agnostic probability tensor.
struct DrawSet {
  std::variant<std::vector<CumulativeParams>, std::vector<CategoricalParams>,
               ProbabilityTensor>
      content;
  /// Predictor names the coefficient columns refer to (parameter draws only).
  std::vector<std::string> predictor_names;

  DrawKind kind() const;
  int size() const;
  int categories() const;

  const std::vector<CumulativeParams>& cumulative() const;
  const std::vector<CategoricalParams>& categorical() const;
  const ProbabilityTensor& tensor() const;

  /// Throws DataError naming the offending draw (1-based) or tensor row.
  void validate() const;
};

enum class ClusterMode { clustered, thinned };

/// The restricted posterior predictive: C groups of draws and the
/// within-group mean probabilities.
struct ClusteredReference {
  ClusterMode mode = ClusterMode::clustered;
  int draw_count = 0;                    // S*
  std::vector<int> assignment;           // S* entries; -1 when a draw is unused
  std::vector<std::vector<int>> members; // per cluster, ascending draw indices
  std::vector<double> weights;           // |I*_c|
  ProbabilityTensor probs;               // C x N x J

  int clusters() const { return static_cast<int>(members.size()); }
  /// Weights normalized to sum to one.
  std::vector<double> normalized_weights() const;
  /// N x J matrix a*_{c,.,.}.
  Eigen::MatrixXd cluster_probs(int c) const { return probs.slice(c); }
};

/// Per-draw predictive probabilities on `data`.
ProbabilityTensor predictive_tensor(const DrawSet& draws, const Dataset& data,
                                    const Link& link);

/// Link-scale clustering features. Cumulative draws: latent predictor (S* x N).
/// Categorical draws or tensors: log(p_j / p_1) for j = 2..J per observation
/// (S* x N(J-1)).
Eigen::MatrixXd clustering_features(const DrawSet& draws, const Dataset& data,
                                    const Link& link);

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  double relative_tolerance = 1e-8;
};

struct KMeansResult {
  std::vector<int> assignment;  // per point
  Eigen::MatrixXd centroids;    // k x dim
  double inertia = 0.0;
  int iterations = 0;
};

/// k-means++ seeded Lloyd iterations on the rows of `points`; best of
/// `restarts` runs. Cluster labels are ordered by their smallest member.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Groups draws by k-means on `features` and averages their probabilities.
ClusteredReference cluster_draws(const ProbabilityTensor& tensor,
                                 const Eigen::MatrixXd& features, int clusters,
                                 std::uint64_t seed, const KMeansOptions& options = {});

/// Keeps `count` equally spaced draws, each as its own cluster. The k-th kept
/// draw (1-based position) is ceil((k - 1/2) S* / count).
ClusteredReference thin_draws(const ProbabilityTensor& tensor, int count);

/// Builds the reference from explicit index sets (used by both paths above).
ClusteredReference aggregate_draws(const ProbabilityTensor& tensor,
                                   std::vector<std::vector<int>> members,
                                   ClusterMode mode);

}  // namespace projsel
