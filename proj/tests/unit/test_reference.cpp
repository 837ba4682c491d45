#include <random>

#include "doctest.h"
#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"
#include "projsel/reference.hpp"

using namespace projsel;

namespace {

Dataset small_data(int n, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Dataset d;
  d.x.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < p; ++k) d.x(i, k) = n01(rng);
  d.y.assign(static_cast<std::size_t>(n), 1);
  for (int k = 0; k < p; ++k) d.column_names.push_back("x" + std::to_string(k + 1));
  d.category_labels = default_category_labels(5);
  return d;
}

Eigen::VectorXd equal_thresholds(int J) {
  Eigen::VectorXd z(J - 1);
  for (int j = 0; j < J - 1; ++j) z(j) = normal_quantile((j + 1.0) / J);
  return z;
}

DrawSet random_cumulative_draws(int S, int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<CumulativeParams> draws;
  for (int s = 0; s < S; ++s) {
    CumulativeParams c{equal_thresholds(5), Eigen::VectorXd(p)};
    for (int k = 0; k < p; ++k) c.coefficients(k) = 0.5 * n01(rng);
    c.thresholds.array() += 0.1 * n01(rng);
    draws.push_back(c);
  }
  DrawSet set{draws, {}};
  for (int k = 0; k < p; ++k) set.predictor_names.push_back("x" + std::to_string(k + 1));
  return set;
}

}  // namespace

TEST_CASE("predictive tensor examples") {
  const Link probit;
  const Dataset d = small_data(7, 2, 1);
  DrawSet one{std::vector<CumulativeParams>{{equal_thresholds(5), Eigen::VectorXd::Zero(2)}},
              {"x1", "x2"}};
  const auto t = predictive_tensor(one, d, probit);
  CHECK(t.draws() == 1);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(t(0, i, j) - 0.2) <= 1e-15);

  std::get<0>(one.content)[0].coefficients(1) = 0.8;
  const auto t2 = predictive_tensor(one, d, probit);
  for (int i = 0; i < 7; ++i) {
    const auto direct = cumulative_pmf(one.cumulative()[0], probit, 0.8 * d.x(i, 1));
    for (int j = 0; j < 5; ++j) CHECK(t2(0, i, j) == direct(j));
  }

  ProbabilityTensor raw(2, 7, 5, 0.2);
  raw(1, 3, 0) = 0.1;
  raw(1, 3, 1) = 0.3;
  const DrawSet tensor_draws{raw, {}};
  const auto t3 = predictive_tensor(tensor_draws, d, probit);
  CHECK(t3.data() == raw.data());
}

TEST_CASE("draw validation names the draw") {
  auto set = random_cumulative_draws(9, 2, 4);
  CHECK_NOTHROW(set.validate());
  auto& v = std::get<std::vector<CumulativeParams>>(set.content);
  std::swap(v[6].thresholds(1), v[6].thresholds(2));
  try {
    set.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("draw 7") != std::string::npos);
  }

  ProbabilityTensor t(1, 2, 2, 0.5);
  t(0, 1, 1) = 0.6;
  CHECK_THROWS_AS((DrawSet{t, {}}).validate(), DataError);
}

TEST_CASE("singleton and single-cluster references") {
  const Link probit;
  const Dataset d = small_data(6, 3, 2);
  const auto draws = random_cumulative_draws(8, 3, 3);
  const auto tensor = predictive_tensor(draws, d, probit);
  const auto features = clustering_features(draws, d, probit);

  const auto singletons = cluster_draws(tensor, features, 8, 7);
  REQUIRE(singletons.clusters() == 8);
  for (int c = 0; c < 8; ++c) {
    REQUIRE(singletons.members[static_cast<std::size_t>(c)].size() == 1);
    const int s = singletons.members[static_cast<std::size_t>(c)][0];
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 5; ++j) CHECK(singletons.probs(c, i, j) == tensor(s, i, j));
  }

  const auto one = cluster_draws(tensor, features, 1, 7);
  const Eigen::MatrixXd mean = tensor.mean();
  CHECK((one.cluster_probs(0) - mean).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(one.weights[0] == 8.0);
}

TEST_CASE("planted partition is recovered") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n01;
  const int S = 40, N = 5;
  Eigen::MatrixXd features(S, N);
  std::vector<int> truth(S);
  for (int s = 0; s < S; ++s) {
    truth[static_cast<std::size_t>(s)] = (s * 7) % 3 == 0 ? 1 : 0;
    for (int i = 0; i < N; ++i) features(s, i) = n01(rng) + 100.0 * truth[static_cast<std::size_t>(s)];
  }
  ProbabilityTensor t(S, N, 2, 0.5);
  const auto cr = cluster_draws(t, features, 2, 1);
  for (int a = 0; a < S; ++a)
    for (int b = 0; b < S; ++b)
      CHECK((cr.assignment[static_cast<std::size_t>(a)] == cr.assignment[static_cast<std::size_t>(b)]) ==
            (truth[static_cast<std::size_t>(a)] == truth[static_cast<std::size_t>(b)]));
}

TEST_CASE("clustering is a partition and preserves the mean predictive") {
  const Link probit;
  const Dataset d = small_data(10, 4, 5);
  const auto draws = random_cumulative_draws(120, 4, 6);
  const auto tensor = predictive_tensor(draws, d, probit);
  const auto features = clustering_features(draws, d, probit);
  for (int C : {2, 5, 17}) {
    const auto cr = cluster_draws(tensor, features, C, 11);
    double total = 0;
    std::vector<int> seen(120, 0);
    for (int c = 0; c < cr.clusters(); ++c) {
      total += cr.weights[static_cast<std::size_t>(c)];
      for (int s : cr.members[static_cast<std::size_t>(c)]) ++seen[static_cast<std::size_t>(s)];
      for (int i = 0; i < 10; ++i) CHECK(std::abs(cr.probs.row(c, i).sum() - 1.0) <= 1e-8);
    }
    CHECK(total == 120.0);
    for (int v : seen) CHECK(v == 1);

    Eigen::MatrixXd mixed = Eigen::MatrixXd::Zero(10, 5);
    for (int c = 0; c < cr.clusters(); ++c)
      mixed += cr.weights[static_cast<std::size_t>(c)] / 120.0 * cr.cluster_probs(c);
    CHECK((mixed - tensor.mean()).cwiseAbs().maxCoeff() <= 1e-12);

    // a* is the arithmetic mean of its members
    for (int c = 0; c < cr.clusters(); ++c) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(10, 5);
      for (int s : cr.members[static_cast<std::size_t>(c)]) m += tensor.slice(s);
      m /= static_cast<double>(cr.members[static_cast<std::size_t>(c)].size());
      CHECK((m - cr.cluster_probs(c)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("clustering is reproducible across thread counts") {
  const Link probit;
  const Dataset d = small_data(12, 3, 8);
  const auto draws = random_cumulative_draws(200, 3, 9);
  const auto tensor = predictive_tensor(draws, d, probit);
  const auto features = clustering_features(draws, d, probit);
  set_thread_count(1);
  const auto a = cluster_draws(tensor, features, 20, 42);
  set_thread_count(4);
  const auto b = cluster_draws(tensor, features, 20, 42);
  set_thread_count(0);
  CHECK(a.assignment == b.assignment);
  CHECK(a.probs.data() == b.probs.data());
}

TEST_CASE("thinning keeps equally spaced draws") {
  ProbabilityTensor t(10, 1, 2, 0.5);
  for (int s = 0; s < 10; ++s) {
    t(s, 0, 0) = s / 10.0;
    t(s, 0, 1) = 1 - s / 10.0;
  }
  const auto all = thin_draws(t, 10);
  for (int c = 0; c < 10; ++c) CHECK(all.members[static_cast<std::size_t>(c)] == std::vector<int>{c});

  const auto five = thin_draws(t, 5);
  std::vector<int> kept;
  for (const auto& m : five.members) kept.push_back(m[0]);
  CHECK(kept == std::vector<int>{0, 2, 4, 6, 8});  // draws 1, 3, 5, 7, 9
  CHECK(five.mode == ClusterMode::thinned);
  CHECK(five.assignment[1] == -1);
  CHECK(five.probs(2, 0, 0) == t(4, 0, 0));

  const auto one = thin_draws(t, 1);
  CHECK(one.members[0] == std::vector<int>{4});  // draw 5 of 10
}

TEST_CASE("clustering features") {
  const Link probit;
  Dataset d = small_data(3, 1, 1);
  d.x << -1, 0, 1;
  DrawSet zero{std::vector<CumulativeParams>{{equal_thresholds(5), Eigen::VectorXd::Zero(1)}},
               {"x1"}};
  CHECK(clustering_features(zero, d, probit).cwiseAbs().maxCoeff() == 0.0);

  DrawSet unit{std::vector<CumulativeParams>{{equal_thresholds(5), Eigen::VectorXd::Ones(1)},
                                             {equal_thresholds(5), Eigen::VectorXd::Ones(1)}},
               {"x1"}};
  const auto f = clustering_features(unit, d, probit);
  REQUIRE(f.rows() == 2);
  REQUIRE(f.cols() == 3);
  for (int s = 0; s < 2; ++s) {
    CHECK(f(s, 0) == -1.0);
    CHECK(f(s, 1) == 0.0);
    CHECK(f(s, 2) == 1.0);
  }

  d.category_labels = default_category_labels(3);
  DrawSet uniform{std::vector<CategoricalParams>{{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(3, 1)}},
                  {"x1"}};
  CHECK(clustering_features(uniform, d, probit).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kmeans on separated blobs") {
  Eigen::MatrixXd pts(6, 1);
  pts << 0.0, 0.1, 0.2, 10.0, 10.1, 10.2;
  const auto r = kmeans(pts, 2, 3);
  CHECK(r.assignment == std::vector<int>{0, 0, 0, 1, 1, 1});
  CHECK(r.inertia == doctest::Approx(0.04).epsilon(1e-9));
  CHECK_THROWS(kmeans(pts, 7, 3));
}
