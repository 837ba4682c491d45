#include "projsel/simulation.hpp"

#include <cmath>
#include <random>

#include "projsel/errors.hpp"

namespace projsel {

const char* const kPseudoVarianceRecipe =
    "sigma_j^2 = -1 / (d^2/d eta^2 log p(y = j | zeta, eta)) at eta = 0 for j = 1..J; "
    "sigma^2 = (prod_j sigma_j^2)^(1/J)";

Eigen::VectorXd make_thresholds(int categories, const Link& link) {
  if (categories < 2) throw InvalidParameter("at least 2 categories are needed");
  Eigen::VectorXd zeta(categories - 1);
  for (int j = 1; j < categories; ++j)
    zeta[j - 1] = link.forward(static_cast<double>(j) / categories);
  return zeta;
}

Eigen::VectorXd pseudo_variance_components(const Eigen::VectorXd& thresholds, const Link& link) {
  const auto J = thresholds.size() + 1;
  Eigen::VectorXd out(J);
  for (Eigen::Index j = 0; j < J; ++j) {
    const double upper = j < J - 1 ? thresholds[j] : INFINITY;
    const double lower = j > 0 ? thresholds[j - 1] : -INFINITY;
    const double p = link.interval(lower, upper);
    // p(eta) = F(upper - eta) - F(lower - eta), differentiated at eta = 0.
    const double d1 = -link.density(upper) + link.density(lower);
    const double d2 = link.density_slope(upper) - link.density_slope(lower);
    const double curvature = d2 / p - (d1 / p) * (d1 / p);
    out[j] = -1.0 / curvature;
  }
  return out;
}

double pseudo_variance(const Eigen::VectorXd& thresholds, const Link& link) {
  const Eigen::VectorXd parts = pseudo_variance_components(thresholds, link);
  return std::exp(parts.array().log().mean());
}

double tau0(double p0, int predictors, double sigma, int observations) {
  if (!(p0 > 0.0) || !(p0 < predictors))
    throw InvalidParameter("p0 must lie strictly between 0 and P");
  if (observations < 1) throw InvalidParameter("N must be positive");
  return p0 / (predictors - p0) * sigma / std::sqrt(static_cast<double>(observations));
}

Eigen::VectorXd draw_rhs_coefficients(int predictors, double tau0, const HorseshoeSettings& hs,
                                      std::uint64_t seed) {
  if (predictors < 0) throw InvalidParameter("negative number of predictors");
  if (!(tau0 >= 0.0)) throw InvalidParameter("tau0 must be nonnegative");
  if (!(hs.slab_df > 0.0) || !(hs.slab_scale > 0.0))
    throw InvalidParameter("slab degrees of freedom and scale must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::cauchy_distribution<double> cauchy(0.0, 1.0);
  // c^2 ~ Inv-Gamma(nu/2, nu s^2/2), i.e. 1 / Gamma(shape nu/2, rate nu s^2/2).
  std::gamma_distribution<double> gamma(hs.slab_df / 2.0,
                                        2.0 / (hs.slab_df * hs.slab_scale * hs.slab_scale));

  const double tau = hs.tau_fixed ? tau0 : tau0 * std::abs(cauchy(rng));
  const double c2 = 1.0 / gamma(rng);
  Eigen::VectorXd beta(predictors);
  for (int p = 0; p < predictors; ++p) {
    const double lambda = std::abs(cauchy(rng));
    const double l2 = lambda * lambda;
    const double t2 = tau * tau;
    // c^2 l^2 / (c^2 + tau^2 l^2), written to survive l^2 = inf.
    const double tilde2 = std::isinf(l2) ? c2 / t2 : c2 * l2 / (c2 + t2 * l2);
    const double z = normal(rng);
    beta[p] = tau == 0.0 ? 0.0 : tau * std::sqrt(tilde2) * z;
  }
  return beta;
}

Dataset generate_dataset(const Eigen::VectorXd& beta, const Eigen::VectorXd& thresholds,
                         const Link& link, int observations, std::uint64_t seed) {
  if (observations < 1) throw InvalidParameter("N must be positive");
  const auto P = beta.size();
  const int J = static_cast<int>(thresholds.size()) + 1;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Dataset data;
  data.x.resize(observations, P);
  data.y.resize(static_cast<std::size_t>(observations));
  for (int i = 0; i < observations; ++i)
    for (Eigen::Index p = 0; p < P; ++p) data.x(i, p) = normal(rng);
  for (Eigen::Index p = 0; p < P; ++p) data.column_names.push_back("x" + std::to_string(p + 1));
  data.category_labels = default_category_labels(J);

  const CumulativeParams params{thresholds, beta};
  const Eigen::VectorXd eta = data.x * beta;
  for (int i = 0; i < observations; ++i) {
    const Eigen::VectorXd prob = cumulative_pmf(params, link, eta[i]);
    const double u = unif(rng);
    int y = J;
    double acc = 0.0;
    for (int j = 0; j < J - 1; ++j) {
      acc += prob[j];
      if (u < acc) {
        y = j + 1;
        break;
      }
    }
    data.y[static_cast<std::size_t>(i)] = y;
  }
  return data;
}

void SimConfig::validate() const {
  if (observations < 2) throw InvalidParameter("N must be at least 2");
  if (predictors < 1) throw InvalidParameter("P must be at least 1");
  if (categories < 2) throw InvalidParameter("J must be at least 2");
  if (!(p0 > 0.0) || !(p0 < predictors)) throw InvalidParameter("p0 must satisfy 0 < p0 < P");
  if (iterations < 1) throw InvalidParameter("R must be at least 1");
  if (reference_draws < 1) throw InvalidParameter("reference draws must be positive");
  if (search_clusters < 1 || eval_draws < 1)
    throw InvalidParameter("cluster counts must be positive");
  if (max_size > predictors) throw InvalidParameter("maximum submodel size exceeds P");
  if (!(threshold_prior_sd > 0.0) || !(coefficient_prior_scale > 0.0))
    throw InvalidParameter("prior scales must be positive");
  if (!(multiplier >= 0.0)) throw InvalidParameter("multiplier must be nonnegative");
  if (!(horseshoe.slab_df > 0.0) || !(horseshoe.slab_scale > 0.0))
    throw InvalidParameter("slab settings must be positive");
}

namespace {

std::string_view bytes_of(const double* data, std::size_t n) {
  return {reinterpret_cast<const char*>(data), n * sizeof(double)};
}

}  // namespace

std::uint64_t dataset_checksum(const Dataset& data) {
  std::uint64_t h = fnv1a(bytes_of(data.x.data(), static_cast<std::size_t>(data.x.size())));
  h = fnv1a({reinterpret_cast<const char*>(data.y.data()), data.y.size() * sizeof(int)}, h);
  for (const auto& name : data.column_names) h = fnv1a(name + '\n', h);
  return h;
}

std::uint64_t draws_checksum(const DrawSet& draws) {
  std::uint64_t h = fnv1a(to_string(draws.kind()));
  switch (draws.kind()) {
    case DrawKind::cumulative_params:
      for (const auto& d : draws.cumulative()) {
        h = fnv1a(bytes_of(d.thresholds.data(), static_cast<std::size_t>(d.thresholds.size())), h);
        h = fnv1a(bytes_of(d.coefficients.data(), static_cast<std::size_t>(d.coefficients.size())),
                  h);
      }
      break;
    case DrawKind::categorical_params:
      for (const auto& d : draws.categorical()) {
        h = fnv1a(bytes_of(d.intercepts.data(), static_cast<std::size_t>(d.intercepts.size())), h);
        h = fnv1a(bytes_of(d.coefficients.data(), static_cast<std::size_t>(d.coefficients.size())),
                  h);
      }
      break;
    case DrawKind::prob_tensor:
      h = fnv1a(bytes_of(draws.tensor().data().data(), draws.tensor().data().size()), h);
      break;
  }
  return h;
}

}  // namespace projsel
