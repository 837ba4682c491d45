#include <random>

#include "doctest.h"
#include "projsel/errors.hpp"
#include "projsel/latent_projection.hpp"
#include "projsel/projection.hpp"
#include "projsel/search_eval.hpp"

using namespace projsel;

namespace {

struct Instance {
  Dataset data;
  DrawSet draws;
};

Eigen::VectorXd equal_thresholds(int J) {
  Eigen::VectorXd z(J - 1);
  for (int j = 0; j < J - 1; ++j) z(j) = normal_quantile((j + 1.0) / J);
  return z;
}

Instance make_instance(int n, int P, int S, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Instance in;
  in.data.x.resize(n, P);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < P; ++k) in.data.x(i, k) = n01(rng);
  in.data.y.assign(static_cast<std::size_t>(n), 1);
  for (int k = 0; k < P; ++k) in.data.column_names.push_back("x" + std::to_string(k + 1));
  in.data.category_labels = default_category_labels(5);
  Eigen::VectorXd beta(P);
  for (int k = 0; k < P; ++k) beta(k) = 0.6 * n01(rng);
  std::vector<CumulativeParams> draws;
  for (int s = 0; s < S; ++s) {
    CumulativeParams c{equal_thresholds(5), beta};
    for (int k = 0; k < P; ++k) c.coefficients(k) += spread * n01(rng);
    c.thresholds.array() += spread * n01(rng);
    draws.push_back(c);
  }
  in.draws = DrawSet{draws, in.data.column_names};
  return in;
}

ClusteredReference clustered(const Instance& in, int C) {
  const Link link;
  const auto tensor = predictive_tensor(in.draws, in.data, link);
  return cluster_draws(tensor, clustering_features(in.draws, in.data, link), C, 5);
}

}  // namespace

TEST_CASE("full subset recovers cluster-mean coefficients") {
  const Instance in = make_instance(50, 4, 60, 0.2, 1);
  const auto cr = clustered(in, 6);
  const auto lat = latent_project(in.data, in.draws, cr, {0, 1, 2, 3});
  REQUIRE(lat.clusters() == 6);
  for (int c = 0; c < 6; ++c) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    Eigen::VectorXd zeta = Eigen::VectorXd::Zero(4);
    for (int s : cr.members[static_cast<std::size_t>(c)]) {
      mean += in.draws.cumulative()[static_cast<std::size_t>(s)].coefficients;
      zeta += in.draws.cumulative()[static_cast<std::size_t>(s)].thresholds;
    }
    const double m = static_cast<double>(cr.members[static_cast<std::size_t>(c)].size());
    CHECK((lat.coefficients[static_cast<std::size_t>(c)] - mean / m).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((lat.thresholds[static_cast<std::size_t>(c)] - zeta / m).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(lat.rss[static_cast<std::size_t>(c)] <= 1e-12);
  }
}

TEST_CASE("empty subset gives threshold-only predictions") {
  const Instance in = make_instance(20, 3, 10, 0.0, 2);
  const auto cr = clustered(in, 1);
  const auto lat = latent_project(in.data, in.draws, cr, {});
  CHECK(lat.coefficients[0].size() == 0);
  const auto probs = latent_predict_response(lat, in.data, Link());
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(probs(i, j) - 0.2) <= 1e-14);
}

TEST_CASE("one predictor matches the closed-form slope") {
  Instance in = make_instance(30, 2, 8, 0.3, 3);
  // center the chosen column so the no-intercept fit is the simple-regression slope
  in.data.x.col(1).array() -= in.data.x.col(1).mean();
  const auto cr = clustered(in, 2);
  const LatentReference ref = latent_reference(in.data, in.draws, cr);
  const auto lat = latent_project(in.data, ref, {1});
  const Eigen::VectorXd x = in.data.x.col(1);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd eta = ref.eta.row(c).transpose();
    eta.array() -= eta.mean();
    const double slope = eta.dot(x) / x.squaredNorm();
    CHECK(std::abs(lat.coefficients[static_cast<std::size_t>(c)](0) - slope) <= 1e-12);
  }
}

TEST_CASE("single cluster reduces to one cumulative pmf") {
  const Instance in = make_instance(15, 2, 5, 0.1, 4);
  const auto cr = clustered(in, 1);
  const auto lat = latent_project(in.data, in.draws, cr, {0});
  const auto probs = latent_predict_response(lat, in.data, Link());
  const CumulativeParams p{lat.thresholds[0], lat.coefficients[0]};
  for (int i = 0; i < 15; ++i) {
    const auto want = cumulative_pmf(p, Link(), lat.coefficients[0](0) * in.data.x(i, 0));
    CHECK((probs.row(i).transpose() - want).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("residuals shrink with the subset and rows stay normalized") {
  const Instance in = make_instance(40, 5, 80, 0.3, 5);
  const auto cr = clustered(in, 4);
  const LatentReference ref = latent_reference(in.data, in.draws, cr);
  std::vector<int> subset;
  auto prev = latent_project(in.data, ref, subset);
  for (int k : {3, 0, 4, 1, 2}) {
    subset.push_back(k);
    const auto next = latent_project(in.data, ref, subset);
    for (int c = 0; c < 4; ++c)
      CHECK(next.rss[static_cast<std::size_t>(c)] <= prev.rss[static_cast<std::size_t>(c)] + 1e-10);
    const auto probs = latent_predict_response(next, in.data, Link());
    for (int i = 0; i < 40; ++i) CHECK(std::abs(probs.row(i).sum() - 1.0) <= 1e-12);
    prev = next;
  }
}

TEST_CASE("latent and augmented projections agree on a realizable instance") {
  const Instance in = make_instance(60, 3, 1, 0.0, 6);
  const auto cr = clustered(in, 1);
  const auto lat = latent_project(in.data, in.draws, cr, {0, 1, 2});
  const auto aug = project(in.data, cr, {0, 1, 2}, FamilyKind::cumulative, Link());
  const Eigen::MatrixXd a = latent_predict_response(lat, in.data, Link());
  const Eigen::MatrixXd b = submodel_predict(aug, in.data);
  CHECK((a - b).cwiseAbs().maxCoeff() <= 0.02);
}

TEST_CASE("held-out MLPD of both methods agree at full size") {
  // Reference generated from the same cumulative model as the submodels.
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const Instance in = make_instance(120, 3, 40, 0.05, seed);
    const Instance test = make_instance(120, 3, 1, 0.0, seed + 100);
    const auto cr = clustered(in, 10);
    const std::vector<int> full{0, 1, 2};
    const auto lat = latent_project(in.data, in.draws, cr, full);
    const auto aug = project(in.data, cr, full, FamilyKind::cumulative, Link());
    // responses for the test set from the first draw
    Dataset t = test.data;
    std::mt19937_64 rng(seed);
    const auto& g = in.draws.cumulative()[0];
    for (int i = 0; i < t.rows(); ++i) {
      const auto p = cumulative_pmf(g, Link(), t.x.row(i).dot(g.coefficients));
      std::discrete_distribution<int> d(p.data(), p.data() + p.size());
      t.y[static_cast<std::size_t>(i)] = d(rng) + 1;
    }
    const double m_lat = observed_log_probs(latent_predict_response(lat, t, Link()), t.y).mean();
    const double m_aug = observed_log_probs(submodel_predict(aug, t), t.y).mean();
    CHECK(std::abs(m_lat - m_aug) <= 0.01);
  }
}

TEST_CASE("latent projection needs cumulative draws") {
  const Instance in = make_instance(10, 2, 3, 0.1, 7);
  const auto cr = clustered(in, 1);
  DrawSet cat{std::vector<CategoricalParams>{{Eigen::VectorXd::Zero(5), Eigen::MatrixXd::Zero(5, 2)}},
              in.data.column_names};
  CHECK_THROWS_AS(latent_reference(in.data, cat, cr), InvalidParameter);
}
