#include "projsel/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "projsel/errors.hpp"

namespace projsel {

std::string_view to_string(LinkKind kind) {
  return kind == LinkKind::logit ? "logit" : "probit";
}

std::string_view to_string(FamilyKind kind) {
  return kind == FamilyKind::cumulative ? "cumulative" : "categorical";
}

LinkKind parse_link(std::string_view name) {
  if (name == "logit") return LinkKind::logit;
  if (name == "probit") return LinkKind::probit;
  throw InvalidParameter("unknown link '" + std::string(name) + "'");
}

FamilyKind parse_family(std::string_view name) {
  if (name == "cumulative") return FamilyKind::cumulative;
  if (name == "categorical") return FamilyKind::categorical;
  throw InvalidParameter("unknown family '" + std::string(name) + "'");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

namespace {

// Acklam's rational approximation for the lower half, polished with Halley
// steps against the erfc-based CDF.
double lower_normal_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double sqrt_two_pi = std::sqrt(2.0 * std::numbers::pi);
  for (int step = 0; step < 2; ++step) {
    const double e = normal_cdf(x) - p;
    const double u = e * sqrt_two_pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("normal_quantile: p outside [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p > 0.5) return -lower_normal_quantile(1.0 - p);  // 1 - p is exact here
  return lower_normal_quantile(p);
}

double Link::forward(double p) const {
  if (kind_ == LinkKind::logit) return std::log(p) - std::log1p(-p);
  return normal_quantile(p);
}

double Link::inverse(double x) const {
  if (kind_ == LinkKind::logit) return logistic(x);
  return normal_cdf(x);
}

double Link::inverse_upper(double x) const {
  if (kind_ == LinkKind::logit) return logistic(-x);
  return normal_cdf(-x);
}

double Link::density(double x) const {
  if (!std::isfinite(x)) return 0.0;
  if (kind_ == LinkKind::logit) return logistic(x) * logistic(-x);
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double Link::density_slope(double x) const {
  if (!std::isfinite(x)) return 0.0;
  if (kind_ == LinkKind::logit) {
    const double s = logistic(x);
    const double t = logistic(-x);
    return s * t * (t - s);
  }
  return -x * density(x);
}

double Link::interval(double lower, double upper) const {
  // Both links are symmetric, so the upper tail is the mirrored lower tail.
  if (lower > 0.0) return inverse_upper(lower) - inverse_upper(upper);
  return inverse(upper) - inverse(lower);
}

void Support::validate() const {
  if (categories < 2) throw InvalidParameter("support needs at least 2 categories");
}

void validate(const CumulativeParams& params) {
  const auto& z = params.thresholds;
  if (z.size() < 1) throw InvalidParameter("cumulative model needs at least one threshold");
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (!std::isfinite(z[j])) throw InvalidParameter("non-finite threshold");
    if (j > 0 && !(z[j] > z[j - 1]))
      throw InvalidParameter("thresholds are not strictly increasing");
  }
  if (!params.coefficients.allFinite()) throw InvalidParameter("non-finite coefficient");
}

void validate(const CategoricalParams& params) {
  if (params.intercepts.size() < 2)
    throw InvalidParameter("categorical model needs at least 2 categories");
  if (params.coefficients.rows() != params.intercepts.size())
    throw InvalidParameter("coefficient matrix must have one row per category");
  if (params.intercepts[0] != 0.0 || !params.coefficients.row(0).isZero(0.0))
    throw InvalidParameter("reference category parameters must be zero");
  if (!params.intercepts.allFinite() || !params.coefficients.allFinite())
    throw InvalidParameter("non-finite categorical parameter");
}

void validate(const ModelParams& params) {
  std::visit([](const auto& p) { validate(p); }, params);
}

FamilyKind family_of(const ModelParams& params) {
  return std::holds_alternative<CumulativeParams>(params) ? FamilyKind::cumulative
                                                          : FamilyKind::categorical;
}

int categories_of(const ModelParams& params) {
  return std::visit([](const auto& p) { return p.categories(); }, params);
}

int predictors_of(const ModelParams& params) {
  if (const auto* c = std::get_if<CumulativeParams>(&params))
    return static_cast<int>(c->coefficients.size());
  return static_cast<int>(std::get<CategoricalParams>(params).coefficients.cols());
}

std::vector<std::string> default_category_labels(int categories) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(std::max(categories, 0)));
  for (int j = 1; j <= categories; ++j) labels.push_back(std::to_string(j));
  return labels;
}

int Dataset::column_index(std::string_view name) const {
  const auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end())
    throw DataError("unknown predictor column '" + std::string(name) + "'");
  return static_cast<int>(it - column_names.begin());
}

Eigen::MatrixXd Dataset::columns(const std::vector<int>& subset) const {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t k = 0; k < subset.size(); ++k) {
    if (subset[k] < 0 || subset[k] >= cols())
      throw DataError("predictor index " + std::to_string(subset[k]) + " out of range");
    out.col(static_cast<Eigen::Index>(k)) = x.col(subset[k]);
  }
  return out;
}

Dataset Dataset::subset_rows(const std::vector<int>& indices) const {
  Dataset out;
  out.column_names = column_names;
  out.category_labels = category_labels;
  out.x.resize(static_cast<Eigen::Index>(indices.size()), x.cols());
  out.y.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(indices[r]);
    out.y.push_back(y[static_cast<std::size_t>(indices[r])]);
  }
  return out;
}

void Dataset::validate() const {
  if (x.rows() < 1) throw DataError("dataset has no observations");
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw DataError("response length does not match predictor rows");
  if (static_cast<Eigen::Index>(column_names.size()) != x.cols())
    throw DataError("column names do not match predictor columns");
  if (categories() < 2) throw DataError("response needs at least 2 categories");
  if (!x.allFinite()) throw DataError("predictor matrix contains non-finite values");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < 1 || y[i] > categories())
      throw DataError("response of observation " + std::to_string(i + 1) +
                      " outside 1.." + std::to_string(categories()));
  }
}

Eigen::VectorXd cumulative_pmf(const CumulativeParams& params, const Link& link,
                               double eta) {
  validate(params);
  const auto& z = params.thresholds;
  const Eigen::Index J = z.size() + 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd p(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    const double upper = j < J - 1 ? z[j] - eta : inf;
    const double lower = j > 0 ? z[j - 1] - eta : -inf;
    p[j] = std::max(link.interval(lower, upper), 0.0);
  }
  return p;
}

Eigen::VectorXd categorical_pmf(const CategoricalParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (params.coefficients.cols() != x.size())
    throw DataError("categorical_pmf: predictor vector has length " +
                    std::to_string(x.size()) + ", expected " +
                    std::to_string(params.coefficients.cols()));
  if (params.coefficients.rows() != params.intercepts.size())
    throw InvalidParameter("categorical_pmf: coefficient rows do not match categories");
  Eigen::VectorXd eta = params.intercepts + params.coefficients * x;
  eta.array() -= eta.maxCoeff();
  Eigen::VectorXd p = eta.array().exp();
  return p / p.sum();
}

Eigen::VectorXd pmf(const ModelParams& params, const Link& link,
                    const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (const auto* c = std::get_if<CumulativeParams>(&params)) {
    if (c->coefficients.size() != x.size())
      throw DataError("cumulative_pmf: predictor vector has length " +
                      std::to_string(x.size()) + ", expected " +
                      std::to_string(c->coefficients.size()));
    return cumulative_pmf(*c, link, c->coefficients.dot(x));
  }
  return categorical_pmf(std::get<CategoricalParams>(params), x);
}

Eigen::VectorXd log_pmf(const ModelParams& params, const Link& link,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd p = pmf(params, link, x);
  return p.array().max(kProbabilityFloor).log();
}

int free_parameter_count(FamilyKind family, int categories, int predictors) {
  if (family == FamilyKind::cumulative) return categories - 1 + predictors;
  return (categories - 1) * (predictors + 1);
}

Eigen::VectorXd flatten(const ModelParams& params) {
  if (const auto* c = std::get_if<CumulativeParams>(&params)) {
    Eigen::VectorXd out(c->thresholds.size() + c->coefficients.size());
    out << c->thresholds, c->coefficients;
    return out;
  }
  const auto& cat = std::get<CategoricalParams>(params);
  const Eigen::Index J = cat.intercepts.size();
  const Eigen::Index d = cat.coefficients.cols();
  Eigen::VectorXd out((J - 1) * (d + 1));
  for (Eigen::Index k = 1; k < J; ++k) {
    const Eigen::Index base = (k - 1) * (d + 1);
    out[base] = cat.intercepts[k];
    out.segment(base + 1, d) = cat.coefficients.row(k).transpose();
  }
  return out;
}

ModelParams unflatten(FamilyKind family, int categories, int predictors,
                      const Eigen::Ref<const Eigen::VectorXd>& flat) {
  if (flat.size() != free_parameter_count(family, categories, predictors))
    throw InvalidParameter("unflatten: parameter vector has the wrong length");
  if (family == FamilyKind::cumulative) {
    CumulativeParams out;
    out.thresholds = flat.head(categories - 1);
    out.coefficients = flat.tail(predictors);
    return out;
  }
  CategoricalParams out;
  out.intercepts = Eigen::VectorXd::Zero(categories);
  out.coefficients = Eigen::MatrixXd::Zero(categories, predictors);
  for (int k = 1; k < categories; ++k) {
    const Eigen::Index base = static_cast<Eigen::Index>(k - 1) * (predictors + 1);
    out.intercepts[k] = flat[base];
    out.coefficients.row(k) = flat.segment(base + 1, predictors).transpose();
  }
  return out;
}

Eigen::MatrixXd log_pmf_jacobian(const ModelParams& params, const Link& link,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  const Eigen::VectorXd p = pmf(params, link, x);
  const int J = categories_of(params);
  const int d = predictors_of(params);
  const FamilyKind family = family_of(params);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(J, free_parameter_count(family, J, d));

  if (family == FamilyKind::cumulative) {
    const auto& c = std::get<CumulativeParams>(params);
    const double eta = c.coefficients.dot(x);
    for (int j = 0; j < J; ++j) {
      if (p[j] < kProbabilityFloor) continue;
      const double fa = j < J - 1 ? link.density(c.thresholds[j] - eta) : 0.0;
      const double fb = j > 0 ? link.density(c.thresholds[j - 1] - eta) : 0.0;
      if (j < J - 1) jac(j, j) += fa / p[j];
      if (j > 0) jac(j, j - 1) -= fb / p[j];
      jac.row(j).tail(d) = (-(fa - fb) / p[j]) * x.transpose();
    }
    return jac;
  }

  for (int j = 0; j < J; ++j) {
    if (p[j] < kProbabilityFloor) continue;
    for (int k = 1; k < J; ++k) {
      const double g = (j == k ? 1.0 : 0.0) - p[k];
      const Eigen::Index base = static_cast<Eigen::Index>(k - 1) * (d + 1);
      jac(j, base) = g;
      jac.row(j).segment(base + 1, d) = g * x.transpose();
    }
  }
  return jac;
}

}  // namespace projsel
