#pragma once

// Response families, links and probability-mass evaluation shared by every
// other part of the library.
//
// Category codes are 1-based: a response with J categories takes values in
// {1, ..., J}. Vectors of probabilities are 0-based (entry j-1 is category j).

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace projsel {

/// Probability floor applied before taking logs.
inline constexpr double kProbabilityFloor = 1e-300;

enum class LinkKind { logit, probit };
enum class FamilyKind { cumulative, categorical };

std::string_view to_string(LinkKind kind);
std::string_view to_string(FamilyKind kind);
LinkKind parse_link(std::string_view name);
FamilyKind parse_family(std::string_view name);

/// Standard normal CDF, accurate in both tails (erfc based).
double normal_cdf(double x);
/// Standard normal quantile, |error| < 1e-14 on (0, 1).
double normal_quantile(double p);

/// Invertible link g : (0, 1) -> R together with the derivatives of g^{-1}
/// needed by the Newton solvers. g^{-1}(-inf) = 0 and g^{-1}(+inf) = 1.
class Link {
 public:
  explicit Link(LinkKind kind = LinkKind::probit) : kind_(kind) {}

  LinkKind kind() const noexcept { return kind_; }

  double forward(double p) const;
  double inverse(double x) const;
  /// 1 - g^{-1}(x) computed without cancellation.
  double inverse_upper(double x) const;
  /// First derivative of g^{-1}.
  double density(double x) const;
  /// Second derivative of g^{-1}.
  double density_slope(double x) const;

  /// g^{-1}(upper) - g^{-1}(lower) for lower <= upper, evaluated in the tail
  /// where it does not cancel.
  double interval(double lower, double upper) const;

 private:
  LinkKind kind_;
};

struct Support {
  int categories = 2;
  bool ordered = true;

  void validate() const;
};

/// Proportional-odds parameters: p(y = j) = g^{-1}(zeta_j - eta) - g^{-1}(zeta_{j-1} - eta).
struct CumulativeParams {
  Eigen::VectorXd thresholds;    // J - 1, strictly increasing
  Eigen::VectorXd coefficients;  // one per predictor in the subset

  int categories() const { return static_cast<int>(thresholds.size()) + 1; }
};

/// Multinomial-logit parameters. Row 0 (category 1) is pinned to zero.
struct CategoricalParams {
  Eigen::VectorXd intercepts;    // J
  Eigen::MatrixXd coefficients;  // J x |subset|

  int categories() const { return static_cast<int>(intercepts.size()); }
};

using ModelParams = std::variant<CumulativeParams, CategoricalParams>;

void validate(const CumulativeParams& params);
void validate(const CategoricalParams& params);
void validate(const ModelParams& params);

FamilyKind family_of(const ModelParams& params);
int categories_of(const ModelParams& params);
int predictors_of(const ModelParams& params);

struct Dataset {
  Eigen::MatrixXd x;                         // N x P
  std::vector<int> y;                        // N codes in {1, ..., J}
  std::vector<std::string> column_names;     // P
  std::vector<std::string> category_labels;  // J; defaults to "1".."J"

  int rows() const { return static_cast<int>(x.rows()); }
  int cols() const { return static_cast<int>(x.cols()); }
  int categories() const { return static_cast<int>(category_labels.size()); }

  /// Column position of `name`; throws DataError when absent.
  int column_index(std::string_view name) const;
  /// Submatrix with the given columns, in the given order.
  Eigen::MatrixXd columns(const std::vector<int>& subset) const;
  /// Rows `indices` as a new dataset sharing names and labels.
  Dataset subset_rows(const std::vector<int>& indices) const;

  void validate() const;
};

/// Labels "1".."J".
std::vector<std::string> default_category_labels(int categories);

Eigen::VectorXd cumulative_pmf(const CumulativeParams& params, const Link& link,
                               double eta);
Eigen::VectorXd categorical_pmf(const CategoricalParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& x);

/// Family-dispatching pmf at predictor vector x (|x| = |subset|).
Eigen::VectorXd pmf(const ModelParams& params, const Link& link,
                    const Eigen::Ref<const Eigen::VectorXd>& x);
/// Elementwise log of pmf with entries below kProbabilityFloor clamped.
Eigen::VectorXd log_pmf(const ModelParams& params, const Link& link,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

/// Number of free parameters: cumulative (J-1) + d, categorical (J-1)(d+1).
int free_parameter_count(FamilyKind family, int categories, int predictors);

/// Free parameters as a flat vector. Cumulative: (zeta, beta). Categorical:
/// for k = 2..J, (intercept_k, coefficients_k) blocks.
Eigen::VectorXd flatten(const ModelParams& params);
ModelParams unflatten(FamilyKind family, int categories, int predictors,
                      const Eigen::Ref<const Eigen::VectorXd>& flat);

/// J x free-parameter Jacobian of log_pmf in the flatten() layout. Rows of
/// clamped entries are zero.
Eigen::MatrixXd log_pmf_jacobian(const ModelParams& params, const Link& link,
                                 const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace projsel
