#pragma once

// Simulation protocol: ordinal data from a cumulative model with
// regularized-horseshoe coefficients, a Laplace-approximated reference
// posterior, and the repeated augmented-vs-latent comparison.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "projsel/csv.hpp"
#include "projsel/model_core.hpp"
#include "projsel/reference.hpp"
#include "projsel/search_eval.hpp"

namespace projsel {

/// zeta_j = g(j / J), j = 1..J-1.
Eigen::VectorXd make_thresholds(int categories, const Link& link);

/// Per-category pseudo variances -1 / (d^2/d eta^2 log p(y = j | zeta, eta))
/// at eta = 0, j = 1..J.
Eigen::VectorXd pseudo_variance_components(const Eigen::VectorXd& thresholds, const Link& link);

/// Geometric mean of pseudo_variance_components (sigma-tilde squared).
double pseudo_variance(const Eigen::VectorXd& thresholds, const Link& link);

/// Human-readable description of the pseudo-variance recipe, echoed in metadata.
extern const char* const kPseudoVarianceRecipe;

/// p0 / (P - p0) * sigma / sqrt(N).
double tau0(double p0, int predictors, double sigma, int observations);

struct HorseshoeSettings {
  double slab_df = 100.0;     // nu
  double slab_scale = 1.0;    // s
  bool tau_fixed = false;     // tau = tau0 instead of tau ~ half-Cauchy(0, tau0)
};

Eigen::VectorXd draw_rhs_coefficients(int predictors, double tau0, const HorseshoeSettings& hs,
                                      std::uint64_t seed);

/// x ~ N(0, 1) iid, y ~ cumulative(zeta, x' beta). Columns are named x1..xP.
Dataset generate_dataset(const Eigen::VectorXd& beta, const Eigen::VectorXd& thresholds,
                         const Link& link, int observations, std::uint64_t seed);

struct ReferencePrior {
  double intercept_sd = 2.5;     // thresholds (cumulative) or intercepts (categorical)
  double coefficient_sd = 1.0;
};

struct LaplaceFit {
  ModelParams mode;
  Eigen::MatrixXd covariance;   // in the flatten() layout
  int iterations = 0;
  int rejected = 0;             // non-monotone draws resampled
  DrawSet draws;
};

/// Penalized mode under independent Gaussian priors, then `draws` samples from
/// the Gaussian approximation at the mode. Cumulative draws with non-monotone
/// thresholds are rejected and resampled.
LaplaceFit fit_reference_laplace_full(const Dataset& data, FamilyKind family, const Link& link,
                                      const ReferencePrior& prior, int draws,
                                      std::uint64_t seed);

DrawSet fit_reference_laplace(const Dataset& data, FamilyKind family, const Link& link,
                              const ReferencePrior& prior, int draws, std::uint64_t seed);

struct SimConfig {
  int observations = 100;  // N (train and test each)
  int predictors = 50;     // P
  int categories = 5;      // J
  double p0 = 10.0;
  int iterations = 100;    // R
  LinkKind link = LinkKind::probit;
  std::uint64_t seed = 20240101;
  HorseshoeSettings horseshoe{};
  int reference_draws = 1000;           // S*
  double threshold_prior_sd = 2.5;
  double coefficient_prior_scale = 30.0;  // ridge sd = tau0 * scale
  int search_clusters = 20;
  int eval_draws = 400;
  int max_size = -1;                    // negative: min(P, 19)
  double multiplier = 1.0;

  void validate() const;
};

struct SimIterationResult {
  int iteration = 0;  // 1-based
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  Eigen::VectorXd beta;
  PerfStats augmented;
  PerfStats latent;
  SolutionPath augmented_path;
  SolutionPath latent_path;
  std::optional<int> suggested_augmented;
  std::optional<int> suggested_latent;
  double runtime_augmented = 0.0;  // minutes
  double runtime_latent = 0.0;
  std::uint64_t train_checksum = 0;
  std::uint64_t test_checksum = 0;
  std::uint64_t draws_checksum = 0;
};

/// One iteration of the protocol; `iteration` is 1-based. Never throws for
/// model-level failures: they are recorded in the result.
SimIterationResult run_iteration(const SimConfig& cfg, int iteration);

/// All iterations, in parallel. Throws when more than 20% fail.
std::vector<SimIterationResult> run_study(const SimConfig& cfg);

/// Aggregate tables keyed by file stem: iterations, fig1_delta_mlpd,
/// fig2_mlpd_diff, fig3_se_diff, fig4_suggested_size_diff, fig5_gmin,
/// table_gmin_smallest, table_gmin_largest, failures. Runtimes are kept
/// separately because they are not reproducible.
std::map<std::string, Table> study_tables(const std::vector<SimIterationResult>& results);
Table runtime_table(const std::vector<SimIterationResult>& results);

/// Suggested-size difference histogram: integer G_lat - G_aug values ascending, then NA_aug,
/// NA_lat and NA_both (always present, possibly zero).
std::vector<std::pair<std::string, int>> suggested_size_histogram(
    const std::vector<SimIterationResult>& results);

/// Checksums binding iterations to their shared inputs.
std::uint64_t dataset_checksum(const Dataset& data);
std::uint64_t draws_checksum(const DrawSet& draws);

}  // namespace projsel
