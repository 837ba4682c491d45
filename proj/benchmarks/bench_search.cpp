#include <benchmark/benchmark.h>

#include "projsel/parallel.hpp"
#include "projsel/reference.hpp"
#include "projsel/search_eval.hpp"
#include "projsel/simulation.hpp"

using namespace projsel;

namespace {

struct Problem {
  Dataset data;
  DrawSet draws;
};

const Problem& problem() {
  static const Problem p = [] {
    const Link link;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(20);
    beta.head(5) << 0.8, -0.6, 0.5, 0.4, -0.3;
    Problem out;
    out.data = generate_dataset(beta, make_thresholds(5, link), link, 100, 3);
    out.draws = fit_reference_laplace(out.data, FamilyKind::cumulative, link, ReferencePrior{}, 1000, 4);
    return out;
  }();
  return p;
}

// Forward search over all 20 predictors with 20 search clusters.
void BM_ForwardSearch(benchmark::State& state) {
  const Problem& p = problem();
  const Link link;
  const auto tensor = predictive_tensor(p.draws, p.data, link);
  const auto clustered = cluster_draws(tensor, clustering_features(p.draws, p.data, link), 20, 5);
  SearchSettings s;
  s.method = state.range(0) == 0 ? SearchMethod::augmented : SearchMethod::latent;
  s.max_size = 20;
  for (auto _ : state) benchmark::DoNotOptimize(forward_search(p.data, clustered, &p.draws, s));
}
BENCHMARK(BM_ForwardSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClusterDraws(benchmark::State& state) {
  const Problem& p = problem();
  const Link link;
  const auto tensor = predictive_tensor(p.draws, p.data, link);
  const auto features = clustering_features(p.draws, p.data, link);
  for (auto _ : state) benchmark::DoNotOptimize(cluster_draws(tensor, features, 20, 5));
}
BENCHMARK(BM_ClusterDraws)->Unit(benchmark::kMillisecond);

}  // namespace
