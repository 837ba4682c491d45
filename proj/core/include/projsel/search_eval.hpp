#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "projsel/latent_projection.hpp"
#include "projsel/model_core.hpp"
#include "projsel/newton.hpp"
#include "projsel/projection.hpp"
#include "projsel/reference.hpp"

namespace projsel {

enum class SearchMethod { augmented, latent };

std::string_view to_string(SearchMethod method);
SearchMethod parse_search_method(std::string_view name);

struct SearchSettings {
  FamilyKind family = FamilyKind::cumulative;
  LinkKind link = LinkKind::probit;
  SearchMethod method = SearchMethod::augmented;
  int max_size = -1;  // G_max; negative means min(P, 19)
  NewtonOptions newton{};
};

int default_max_size(int predictors);

struct SolutionPath {
  SearchMethod method = SearchMethod::augmented;
  std::vector<int> order;               // dataset column positions, search order
  std::vector<std::string> names;
  /// Search objective per size 0..|order|: cluster-weighted projected
  /// log-likelihood (augmented) or negative weighted latent RSS (latent).
  std::vector<double> objective;
  std::vector<std::string> warnings;
  bool truncated = false;

  int size() const { return static_cast<int>(order.size()); }
  std::vector<int> subset(int g) const;
};

/// Draws are only consulted by the latent method (cumulative-params needed).
SolutionPath forward_search(const Dataset& data, const ClusteredReference& search_reference,
                            const DrawSet* draws, const SearchSettings& settings);

struct SizeStats {
  int size = 0;
  double mlpd = 0.0;
  double se_mlpd = 0.0;
  double delta_mlpd = 0.0;
  double se_delta_mlpd = 0.0;
  double gmpd = 0.0;
};

struct PerfStats {
  std::vector<SizeStats> sizes;
  double ref_mlpd = 0.0;
  double ref_se_mlpd = 0.0;
  double ref_gmpd = 0.0;
  /// Per-observation log predictive probabilities, (sizes) x N_test.
  Eigen::MatrixXd lpd;
  Eigen::VectorXd ref_lpd;
};

/// MLPD, SEs and paired differences from per-observation lpds. Rows of `lpd`
/// are sizes 0, 1, ...
PerfStats summarize_lpd(Eigen::MatrixXd lpd, Eigen::VectorXd ref_lpd);

/// Sample standard deviation / sqrt(n), summing in index order.
double standard_error(const Eigen::VectorXd& values);

/// log p(y_i) for each row of a probability matrix.
Eigen::VectorXd observed_log_probs(const Eigen::MatrixXd& probs, const std::vector<int>& y);

/// Re-projects every path prefix with the evaluation reference and scores it
/// on `test` (lpd per observation, paired with the reference lpds).
PerfStats evaluate(const SolutionPath& path, const Dataset& train,
                   const ClusteredReference& eval_reference, const DrawSet* draws,
                   const Dataset& test, const Eigen::MatrixXd& reference_test_probs,
                   const SearchSettings& settings);

/// Smallest g with delta_mlpd(g) >= -multiplier * se_delta_mlpd(g).
std::optional<int> suggest_size(const std::vector<SizeStats>& stats, double multiplier = 1.0);

struct ReferenceSettings {
  int search_clusters = 20;    // C_search
  int eval_draws = 400;        // C_eval (thinned)
  std::uint64_t seed = 1;
  KMeansOptions kmeans{};
};

struct VarselResult {
  SolutionPath path;
  PerfStats stats;
};

/// Clusters the draws for the search, thins them for evaluation, and scores
/// every size on `test`. `reference_test_probs` may be empty when the draws
/// are parameter draws (then it is computed from them).
VarselResult varsel(const Dataset& train, const DrawSet& draws, const Dataset& test,
                    const SearchSettings& settings, const ReferenceSettings& reference,
                    Eigen::MatrixXd reference_test_probs = {});

/// Reference draws for a training portion. fold = -1 requests the full data.
using DrawsProvider = std::function<DrawSet(int fold, const Dataset& train)>;

/// Stratified by response category; fold ids 0..K-1 per observation.
std::vector<int> stratified_folds(const std::vector<int>& y, int categories, int folds,
                                  std::uint64_t seed);

struct KFoldResult {
  PerfStats stats;
  std::vector<int> fold_of;
  std::vector<SolutionPath> fold_paths;
  SolutionPath full_path;
};

/// Folds run in parallel. `fold_of` may be given explicitly (ids 0..K-1);
/// otherwise stratified folds are drawn from `seed`.
KFoldResult kfold_evaluate(const Dataset& data, const DrawsProvider& provider, int folds,
                           const SearchSettings& settings, const ReferenceSettings& reference,
                           std::vector<int> fold_of = {});

struct AgreementTable {
  std::vector<std::string> predictors;  // full-data path order
  Eigen::MatrixXd proportion;           // row g-1 = size g, column = predictor
};

AgreementTable fold_agreement(const std::vector<SolutionPath>& fold_paths,
                              const SolutionPath& full_path);

}  // namespace projsel
