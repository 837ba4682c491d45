#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "projsel/errors.hpp"
#include "projsel/model_core.hpp"

using namespace projsel;

namespace {

oracle::Link to_oracle(LinkKind k) {
  return k == LinkKind::probit ? oracle::Link::probit : oracle::Link::logit;
}

std::vector<double> std_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

CumulativeParams random_cumulative(std::mt19937_64& rng, int J, int d) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> gap(0.2, 1.5);
  CumulativeParams p;
  p.thresholds.resize(J - 1);
  double z = n01(rng) - 1.0;
  for (int j = 0; j < J - 1; ++j) {
    p.thresholds(j) = z;
    z += gap(rng);
  }
  p.coefficients.resize(d);
  for (int k = 0; k < d; ++k) p.coefficients(k) = n01(rng);
  return p;
}

CategoricalParams random_categorical(std::mt19937_64& rng, int J, int d) {
  std::normal_distribution<double> n01;
  CategoricalParams p;
  p.intercepts = Eigen::VectorXd::Zero(J);
  p.coefficients = Eigen::MatrixXd::Zero(J, d);
  for (int k = 1; k < J; ++k) {
    p.intercepts(k) = n01(rng);
    for (int c = 0; c < d; ++c) p.coefficients(k, c) = n01(rng);
  }
  return p;
}

}  // namespace

TEST_CASE("normal cdf agrees with 50-digit erfc") {
  for (double x = -37.5; x <= 8.5; x += 0.0625) {
    const double ref = static_cast<double>(oracle::normal_cdf_hp(x));
    const double got = normal_cdf(x);
    CHECK(std::abs(got - ref) <= 1e-15);
    // relative accuracy limited by the conditioning of Phi, roughly x^2 ulps
    if (ref > 0) CHECK(std::abs(got - ref) <= 1e-15 * (4.0 + x * x) * ref);
  }
}

TEST_CASE("normal quantile is accurate to 1e-12") {
  for (double lp = -14; lp <= -0.0001; lp += 0.05) {
    const double p = std::pow(10.0, lp);
    for (double q : {p, 1.0 - p}) {
      if (!(q > 0 && q < 1)) continue;
      const double x = normal_quantile(q);
      const double back = static_cast<double>(oracle::normal_cdf_hp(x));
      CHECK(std::abs(back - q) <= 1e-12 * std::max(1e-3, std::min(q, 1 - q)) + 1e-16);
    }
  }
}

TEST_CASE("link inverse round-trips and is monotone") {
  for (LinkKind kind : {LinkKind::probit, LinkKind::logit}) {
    const Link link(kind);
    double prev = -1.0;
    for (double lp = -8; lp <= 0; lp += 0.01) {
      const double p = std::min(std::pow(10.0, lp), 1 - 1e-8);
      CHECK(std::abs(link.inverse(link.forward(p)) - p) <= 1e-12);
      const double q = 1.0 - std::pow(10.0, lp) + 1e-8;
      if (q < 1.0) CHECK(std::abs(link.inverse(link.forward(q)) - q) <= 1e-12);
    }
    for (double x = -30; x <= 30; x += 0.1) {
      const double v = link.inverse(x);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK(link.inverse(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(link.inverse(std::numeric_limits<double>::infinity()) == 1.0);
  }
}

TEST_CASE("cumulative pmf examples") {
  const Link probit(LinkKind::probit), logit(LinkKind::logit);
  CumulativeParams two{Eigen::VectorXd::Zero(1), Eigen::VectorXd()};
  const auto p2 = cumulative_pmf(two, probit, 0.0);
  CHECK(p2(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p2(1) == doctest::Approx(0.5).epsilon(1e-15));

  CumulativeParams five{Eigen::VectorXd(4), Eigen::VectorXd()};
  for (int j = 0; j < 4; ++j) five.thresholds(j) = oracle::quantile_hp(oracle::Link::probit, (j + 1) / 5.0);
  const auto p5 = cumulative_pmf(five, probit, 0.0);
  for (int j = 0; j < 5; ++j) CHECK(std::abs(p5(j) - 0.2) <= 1e-14);

  CumulativeParams three{Eigen::Vector2d(-1.0, 1.0), Eigen::VectorXd()};
  const auto p3 = cumulative_pmf(three, logit, 0.5);
  const double s1 = static_cast<double>(oracle::logistic_hp(-1.5));
  const double s2 = static_cast<double>(oracle::logistic_hp(0.5));
  CHECK(std::abs(p3(0) - s1) <= 1e-15);
  CHECK(std::abs(p3(1) - (s2 - s1)) <= 1e-15);
  CHECK(std::abs(p3(2) - (1 - s2)) <= 1e-15);
}

TEST_CASE("categorical pmf examples") {
  CategoricalParams zero{Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(4, 2)};
  const auto u = categorical_pmf(zero, Eigen::Vector2d(3.0, -7.0));
  for (int j = 0; j < 4; ++j) CHECK(u(j) == doctest::Approx(0.25).epsilon(1e-15));

  CategoricalParams p{Eigen::Vector3d(0.0, 0.7, -1.3), Eigen::MatrixXd::Zero(3, 0)};
  const auto got = categorical_pmf(p, Eigen::VectorXd());
  const auto want = oracle::softmax({0.0, 0.7, -1.3});
  for (int j = 0; j < 3; ++j) CHECK(std::abs(got(j) - want[static_cast<std::size_t>(j)]) <= 1e-15);
}

TEST_CASE("log pmf examples and clamp") {
  const Link probit(LinkKind::probit);
  CumulativeParams five{Eigen::VectorXd(4), Eigen::VectorXd::Zero(1)};
  for (int j = 0; j < 4; ++j) five.thresholds(j) = normal_quantile((j + 1) / 5.0);
  const auto lp = log_pmf(five, probit, Eigen::VectorXd::Zero(1));
  for (int j = 0; j < 5; ++j) CHECK(std::abs(lp(j) - std::log(0.2)) <= 1e-13);

  // Category 1 at eta = 40 has probability ~1e-365, far below the floor.
  five.coefficients(0) = 1.0;
  const auto clamped = log_pmf(five, probit, Eigen::VectorXd::Constant(1, 40.0));
  const oracle::hp exact = oracle::normal_cdf_hp(oracle::hp(five.thresholds(0)) - 40);
  CHECK(exact < oracle::hp(1e-300));
  CHECK(clamped(0) == std::log(kProbabilityFloor));
  CHECK(std::isfinite(clamped(0)));
}

TEST_CASE("pmf properties on random inputs") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 200; ++trial) {
    const int J = 2 + trial % 5, d = trial % 4;
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = 2 * n01(rng);
    for (LinkKind kind : {LinkKind::probit, LinkKind::logit}) {
      const Link link(kind);
      const auto cp = random_cumulative(rng, J, d);
      const auto p = pmf(cp, link, x);
      CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
      CHECK(p.minCoeff() >= 0.0);
      const auto ref = oracle::cumulative_pmf(to_oracle(kind), std_vec(cp.thresholds),
                                              cp.coefficients.dot(x));
      for (int j = 0; j < J; ++j) CHECK(std::abs(p(j) - ref[static_cast<std::size_t>(j)]) <= 1e-14);
      // exp(log pmf) = pmf away from the clamp
      const auto lp = log_pmf(cp, link, x);
      for (int j = 0; j < J; ++j)
        if (p(j) > 1e-250) CHECK(std::abs(std::exp(lp(j)) - p(j)) <= 1e-12 * std::max(1.0, p(j)));

      // translation coupling: eta + c and zeta + c
      const double c = n01(rng);
      CumulativeParams shifted = cp;
      shifted.thresholds.array() += c;
      const double eta = cp.coefficients.dot(x);
      const auto a = cumulative_pmf(cp, link, eta);
      const auto b = cumulative_pmf(shifted, link, eta + c);
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto kp = random_categorical(rng, J, d);
    const auto q = pmf(kp, Link(), x);
    CHECK(std::abs(q.sum() - 1.0) <= 1e-12);
    CHECK(q.minCoeff() >= 0.0);
    // shift invariance of the softmax: add a constant to every intercept
    CategoricalParams moved = kp;
    moved.intercepts.array() += 3.7;
    const auto q2 = categorical_pmf(moved, x);
    CHECK((q - q2).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("log pmf jacobian matches central differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int J = 2 + trial % 4, d = 1 + trial % 3;
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x(k) = n01(rng);
    const bool cumulative = trial % 2 == 0;
    const Link link(trial % 4 < 2 ? LinkKind::probit : LinkKind::logit);
    const ModelParams params = cumulative ? ModelParams(random_cumulative(rng, J, d))
                                          : ModelParams(random_categorical(rng, J, d));
    const FamilyKind fam = family_of(params);
    const Eigen::VectorXd flat = flatten(params);
    const Eigen::MatrixXd jac = log_pmf_jacobian(params, link, x);
    REQUIRE(jac.rows() == J);
    REQUIRE(jac.cols() == free_parameter_count(fam, J, d));
    for (int j = 0; j < J; ++j) {
      auto f = [&](const Eigen::VectorXd& t) {
        return log_pmf(unflatten(fam, J, d, t), link, x)(j);
      };
      const Eigen::VectorXd fd = oracle::fd_gradient(f, flat, 1e-5);
      for (Eigen::Index k = 0; k < fd.size(); ++k) {
        const double scale = std::max(1.0, std::abs(fd(k)));
        CHECK(std::abs(jac(j, k) - fd(k)) <= 1e-4 * scale);
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("flatten and unflatten round trip") {
  std::mt19937_64 rng(3);
  const auto cp = random_cumulative(rng, 4, 3);
  const auto flat = flatten(cp);
  CHECK(flat.size() == free_parameter_count(FamilyKind::cumulative, 4, 3));
  const auto back = std::get<CumulativeParams>(unflatten(FamilyKind::cumulative, 4, 3, flat));
  CHECK(back.thresholds == cp.thresholds);
  CHECK(back.coefficients == cp.coefficients);

  const auto kp = random_categorical(rng, 3, 2);
  const auto kflat = flatten(kp);
  CHECK(kflat.size() == 6);
  CHECK(kflat(0) == kp.intercepts(1));
  CHECK(kflat(1) == kp.coefficients(1, 0));
  CHECK(kflat(3) == kp.intercepts(2));
  const auto kback = std::get<CategoricalParams>(unflatten(FamilyKind::categorical, 3, 2, kflat));
  CHECK(kback.intercepts == kp.intercepts);
  CHECK(kback.coefficients == kp.coefficients);
}

TEST_CASE("parameter and dataset validation") {
  CumulativeParams bad{Eigen::Vector3d(0.0, -1.0, 2.0), Eigen::VectorXd()};
  CHECK_THROWS_AS(validate(bad), InvalidParameter);
  CategoricalParams pinned{Eigen::Vector3d(0.5, 0.0, 0.0), Eigen::MatrixXd::Zero(3, 1)};
  CHECK_THROWS_AS(validate(pinned), InvalidParameter);

  Dataset d;
  d.x = Eigen::MatrixXd::Zero(3, 1);
  d.y = {1, 2, 4};
  d.column_names = {"a"};
  d.category_labels = default_category_labels(3);
  CHECK_THROWS_AS(d.validate(), DataError);
  d.y = {1, 2, 3};
  CHECK_NOTHROW(d.validate());
  CHECK(d.column_index("a") == 0);
  CHECK_THROWS_AS(d.column_index("b"), DataError);

  CHECK(parse_link("logit") == LinkKind::logit);
  CHECK(parse_family("categorical") == FamilyKind::categorical);
  CHECK_THROWS(parse_link("cloglog"));
}
