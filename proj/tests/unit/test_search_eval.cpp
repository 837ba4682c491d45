#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"
#include "projsel/search_eval.hpp"
#include "projsel/simulation.hpp"

using namespace projsel;

namespace {

Eigen::VectorXd equal_thresholds(int J) {
  Eigen::VectorXd z(J - 1);
  for (int j = 0; j < J - 1; ++j) z(j) = normal_quantile((j + 1.0) / J);
  return z;
}

Dataset design(int n, int P, std::uint64_t seed, int J = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Dataset d;
  d.x.resize(n, P);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < P; ++k) d.x(i, k) = n01(rng);
  d.y.assign(static_cast<std::size_t>(n), 1);
  for (int k = 0; k < P; ++k) d.column_names.push_back("x" + std::to_string(k + 1));
  d.category_labels = default_category_labels(J);
  return d;
}

/// Draws whose coefficients are zero except at `planted`.
DrawSet planted_draws(int P, int planted, int S, double scale, std::uint64_t seed, int J = 4) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  std::vector<CumulativeParams> draws;
  for (int s = 0; s < S; ++s) {
    CumulativeParams c{equal_thresholds(J), Eigen::VectorXd::Zero(P)};
    c.coefficients(planted) = 1.2 + scale * n01(rng);
    c.thresholds.array() += 0.05 * n01(rng);
    draws.push_back(c);
  }
  DrawSet set{draws, {}};
  for (int k = 0; k < P; ++k) set.predictor_names.push_back("x" + std::to_string(k + 1));
  return set;
}

SolutionPath path_of(const std::vector<std::string>& names) {
  SolutionPath p;
  for (std::size_t k = 0; k < names.size(); ++k) {
    p.order.push_back(static_cast<int>(k));
    p.names.push_back(names[k]);
  }
  return p;
}

}  // namespace

TEST_CASE("single predictor path") {
  const Dataset d = design(20, 1, 1);
  const DrawSet draws = planted_draws(1, 0, 10, 0.1, 2);
  const auto cr = thin_draws(predictive_tensor(draws, d, Link()), 10);
  const SolutionPath path = forward_search(d, cr, &draws, SearchSettings{});
  CHECK(path.order == std::vector<int>{0});
  CHECK(path.names == std::vector<std::string>{"x1"});
  CHECK(path.objective.size() == 2);
  CHECK(path.subset(0).empty());
}

TEST_CASE("planted predictor is selected first") {
  for (int planted = 0; planted < 5; ++planted) {
    const Dataset d = design(60, 5, 10 + static_cast<std::uint64_t>(planted));
    const DrawSet draws = planted_draws(5, planted, 40, 0.1, 3);
    const auto tensor = predictive_tensor(draws, d, Link());
    const auto cr = cluster_draws(tensor, clustering_features(draws, d, Link()), 8, 1);
    for (SearchMethod m : {SearchMethod::augmented, SearchMethod::latent}) {
      SearchSettings s;
      s.method = m;
      const SolutionPath path = forward_search(d, cr, &draws, s);
      REQUIRE(path.size() == 5);
      CHECK(path.order[0] == planted);
      // nested, no repeats
      CHECK(std::set<int>(path.order.begin(), path.order.end()).size() == 5);
      for (int g = 0; g < 5; ++g) CHECK(path.subset(g + 1).size() == static_cast<std::size_t>(g + 1));
    }
  }
}

TEST_CASE("size-1 choice equals an exhaustive independent KL comparison") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 12; ++trial) {
    const int P = 2 + trial % 3, N = 5 + trial % 4, S = 6;
    const Dataset d = design(N, P, 200 + static_cast<std::uint64_t>(trial), 3);
    std::vector<CumulativeParams> raw;
    for (int s = 0; s < S; ++s) {
      CumulativeParams c{equal_thresholds(3), Eigen::VectorXd(P)};
      for (int k = 0; k < P; ++k) c.coefficients(k) = 0.8 * n01(rng);
      raw.push_back(c);
    }
    const DrawSet draws{raw, d.column_names};
    const auto cr = thin_draws(predictive_tensor(draws, d, Link()), 3);
    SearchSettings settings;
    settings.max_size = 1;
    const SolutionPath path = forward_search(d, cr, &draws, settings);

    int best = -1;
    double best_kl = std::numeric_limits<double>::infinity();
    for (int k = 0; k < P; ++k) {
      double kl = 0.0;
      for (int c = 0; c < cr.clusters(); ++c) {
        const Eigen::MatrixXd a = cr.cluster_probs(c);
        const oracle::Fit fit = oracle::fit_cumulative(oracle::Link::probit, d.x.col(k), a);
        double entropy = 0.0;
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < 3; ++j)
            if (a(i, j) > 0) entropy += a(i, j) * std::log(a(i, j));
        kl += cr.weights[static_cast<std::size_t>(c)] * (entropy - fit.value) / N;
      }
      if (kl < best_kl) {
        best_kl = kl;
        best = k;
      }
    }
    CHECK(path.order[0] == best);
  }
}

TEST_CASE("ties go to the lowest column index") {
  Dataset d = design(40, 3, 5);
  d.x.col(2) = d.x.col(0);
  const DrawSet draws = planted_draws(3, 0, 20, 0.1, 6);
  const auto cr = thin_draws(predictive_tensor(draws, d, Link()), 5);
  SearchSettings s;
  s.max_size = 1;
  CHECK(forward_search(d, cr, &draws, s).order[0] == 0);
  s.method = SearchMethod::latent;
  CHECK(forward_search(d, cr, &draws, s).order[0] == 0);
}

TEST_CASE("max size handling") {
  CHECK(default_max_size(5) == 5);
  CHECK(default_max_size(50) == 19);
  const Dataset d = design(20, 3, 1);
  const DrawSet draws = planted_draws(3, 0, 5, 0.1, 2);
  const auto cr = thin_draws(predictive_tensor(draws, d, Link()), 5);
  SearchSettings s;
  s.max_size = 4;
  CHECK_THROWS_AS(forward_search(d, cr, &draws, s), InvalidParameter);
  s.max_size = 2;
  CHECK(forward_search(d, cr, &draws, s).size() == 2);
}

TEST_CASE("lpd summaries") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01;
  const int N = 25;
  Eigen::VectorXd ref(N);
  for (int i = 0; i < N; ++i) ref(i) = -1.0 + 0.3 * n01(rng);

  SUBCASE("identical predictions give zero difference and zero SE") {
    Eigen::MatrixXd lpd(3, N);
    for (int g = 0; g < 3; ++g) lpd.row(g) = ref.transpose();
    const PerfStats st = summarize_lpd(lpd, ref);
    for (const auto& s : st.sizes) {
      CHECK(s.delta_mlpd == 0.0);
      CHECK(s.se_delta_mlpd == 0.0);
    }
  }

  SUBCASE("GMPD is exp(MLPD) and SEs match a two-pass oracle") {
    Eigen::MatrixXd lpd(4, N);
    for (int g = 0; g < 4; ++g)
      for (int i = 0; i < N; ++i) lpd(g, i) = ref(i) - 0.5 / (g + 1) + 0.2 * n01(rng);
    const PerfStats st = summarize_lpd(lpd, ref);
    CHECK(st.ref_gmpd == std::exp(st.ref_mlpd));
    for (int g = 0; g < 4; ++g) {
      const auto& s = st.sizes[static_cast<std::size_t>(g)];
      CHECK(s.size == g);
      CHECK(s.gmpd == std::exp(s.mlpd));
      CHECK(s.delta_mlpd == s.mlpd - st.ref_mlpd);
      std::vector<double> v, diff;
      for (int i = 0; i < N; ++i) {
        v.push_back(lpd(g, i));
        diff.push_back(lpd(g, i) - ref(i));
      }
      CHECK(std::abs(s.se_mlpd - oracle::standard_error(v)) <= 1e-14);
      CHECK(std::abs(s.se_delta_mlpd - oracle::standard_error(diff)) <= 1e-14);
      // paired SE never exceeds the sum of the marginal SEs
      CHECK(s.se_delta_mlpd <= s.se_mlpd + st.ref_se_mlpd + 1e-15);
    }
  }

  SUBCASE("uniform J = 5 predictions") {
    const Eigen::MatrixXd probs = Eigen::MatrixXd::Constant(N, 5, 0.2);
    std::vector<int> y(N);
    for (int i = 0; i < N; ++i) y[static_cast<std::size_t>(i)] = 1 + i % 5;
    const Eigen::VectorXd lp = observed_log_probs(probs, y);
    const PerfStats st = summarize_lpd(lp.transpose(), lp);
    CHECK(st.sizes[0].mlpd == doctest::Approx(-1.6094379124341003).epsilon(1e-15));
    CHECK(st.sizes[0].gmpd == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(std::exp(-1.4) == doctest::Approx(0.2466).epsilon(1e-4));
  }
}

TEST_CASE("suggested size rule") {
  auto stats = [](std::vector<double> delta, std::vector<double> se) {
    std::vector<SizeStats> out;
    for (std::size_t g = 0; g < delta.size(); ++g) {
      SizeStats s;
      s.size = static_cast<int>(g);
      s.delta_mlpd = delta[g];
      s.se_delta_mlpd = se[g];
      out.push_back(s);
    }
    return out;
  };
  CHECK(suggest_size(stats({0, 0, 0}, {0.1, 0.1, 0.1})) == 0);
  CHECK(suggest_size(stats({-0.5, -0.2, -0.05, -0.01}, {0.1, 0.1, 0.1, 0.1})) == 2);
  CHECK_FALSE(suggest_size(stats({-0.5, -0.4, -0.3}, {0.1, 0.1, 0.1})).has_value());

  // a larger multiplier never yields a larger size
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> delta, se;
    for (int g = 0; g < 8; ++g) {
      delta.push_back(-u(rng) / (g + 1));
      se.push_back(0.05 + 0.1 * u(rng));
    }
    const auto st = stats(delta, se);
    std::optional<int> prev;
    for (double m : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      const auto g = suggest_size(st, m);
      if (prev) {
        CHECK(g.has_value());
        CHECK(*g <= *prev);
      }
      if (g) prev = g;
    }
  }
}

TEST_CASE("stratified folds") {
  std::vector<int> y;
  for (int i = 0; i < 53; ++i) y.push_back(1 + (i * 7) % 3);
  const auto folds = stratified_folds(y, 3, 5, 17);
  for (int cat = 1; cat <= 3; ++cat) {
    std::vector<int> count(5, 0);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == cat) ++count[static_cast<std::size_t>(folds[i])];
    CHECK(*std::max_element(count.begin(), count.end()) - *std::min_element(count.begin(), count.end()) <= 1);
  }
  CHECK(stratified_folds(y, 3, 5, 17) == folds);

  // K = N: every observation in its own fold
  const auto loo = stratified_folds(y, 3, 53, 2);
  CHECK(std::set<int>(loo.begin(), loo.end()).size() == 53);
}

TEST_CASE("fold agreement counts") {
  const SolutionPath full = path_of({"a", "b", "c"});
  std::vector<SolutionPath> same(4, full);
  const AgreementTable t = fold_agreement(same, full);
  CHECK(t.predictors == std::vector<std::string>{"a", "b", "c"});
  for (int g = 0; g < 3; ++g)
    for (int p = 0; p < 3; ++p) CHECK(t.proportion(g, p) == (g == p ? 1.0 : 0.0));

  std::vector<SolutionPath> thirty(28, full);
  thirty.push_back(path_of({"b", "a", "c"}));
  thirty.push_back(path_of({"b", "a", "c"}));
  const AgreementTable u = fold_agreement(thirty, full);
  CHECK(u.proportion(0, 0) == doctest::Approx(28.0 / 30));
  CHECK(u.proportion(1, 1) == doctest::Approx(28.0 / 30));
  CHECK(u.proportion(0, 1) == doctest::Approx(2.0 / 30));
  CHECK(u.proportion(2, 2) == 1.0);

  std::vector<SolutionPath> missing(3, path_of({"a", "b"}));
  const AgreementTable v = fold_agreement(missing, full);
  CHECK(v.proportion(2, 2) == 0.0);
  CHECK(v.proportion(0, 2) == 0.0);
}

TEST_CASE("evaluate and k-fold pooling") {
  Dataset d = design(60, 3, 41, 3);
  const DrawSet truth = planted_draws(3, 1, 1, 0.0, 1, 3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < d.rows(); ++i) {
    const auto& g = truth.cumulative()[0];
    const auto p = cumulative_pmf(g, Link(), d.x.row(i).dot(g.coefficients));
    std::discrete_distribution<int> pick(p.data(), p.data() + p.size());
    d.y[static_cast<std::size_t>(i)] = pick(rng) + 1;
  }
  const ReferencePrior prior{2.5, 1.0};
  const DrawsProvider provider = [&](int fold, const Dataset& train) {
    return fit_reference_laplace(train, FamilyKind::cumulative, Link(), prior, 100,
                                 derive_seed(7, static_cast<std::uint64_t>(fold + 2)));
  };
  ReferenceSettings ref;
  ref.search_clusters = 5;
  ref.eval_draws = 50;

  set_thread_count(1);
  const KFoldResult a = kfold_evaluate(d, provider, 4, SearchSettings{}, ref);
  set_thread_count(3);
  const KFoldResult b = kfold_evaluate(d, provider, 4, SearchSettings{}, ref);
  set_thread_count(0);

  CHECK(a.fold_of == b.fold_of);
  CHECK(a.stats.lpd == b.stats.lpd);
  CHECK(a.fold_paths.size() == 4);
  CHECK(a.full_path.size() == 3);
  REQUIRE(a.stats.lpd.cols() == 60);
  for (std::size_t g = 0; g < a.stats.sizes.size(); ++g) {
    const double pooled = a.stats.lpd.row(static_cast<Eigen::Index>(g)).mean();
    CHECK(std::abs(a.stats.sizes[g].mlpd - pooled) <= 1e-14);
  }
  CHECK(std::abs(a.stats.ref_mlpd - a.stats.ref_lpd.mean()) <= 1e-14);
  CHECK(a.full_path.order[0] == 1);

  // explicit fold ids are honoured
  std::vector<int> ids(60);
  for (int i = 0; i < 60; ++i) ids[static_cast<std::size_t>(i)] = i % 3;
  const KFoldResult c = kfold_evaluate(d, provider, 3, SearchSettings{}, ref, ids);
  CHECK(c.fold_of == ids);

  // evaluate() on a known path: sizes 0..|path|, deltas paired with the reference
  const DrawSet draws = provider(-1, d);
  const VarselResult vs = varsel(d, draws, d, SearchSettings{}, ref);
  CHECK(vs.stats.sizes.size() == static_cast<std::size_t>(vs.path.size() + 1));
  for (const auto& s : vs.stats.sizes) CHECK(s.delta_mlpd == s.mlpd - vs.stats.ref_mlpd);
}

TEST_CASE("tensor reference needs test probabilities") {
  const Dataset d = design(10, 2, 1, 2);
  ProbabilityTensor t(3, 10, 2, 0.5);
  const DrawSet draws{t, {}};
  CHECK_THROWS_AS(varsel(d, draws, d, SearchSettings{}, ReferenceSettings{}), DataError);
}
