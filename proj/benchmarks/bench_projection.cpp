#include <random>

#include <benchmark/benchmark.h>

#include "projsel/projection.hpp"
#include "projsel/simulation.hpp"

using namespace projsel;

namespace {

// One cluster projection onto a random subset of the desk-scale problem.
void BM_ProjectCluster(benchmark::State& state) {
  const int n = 100, d = static_cast<int>(state.range(0)), J = 5;
  const Link link;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) x(i, k) = n01(rng);
  Eigen::VectorXd beta(d);
  for (int k = 0; k < d; ++k) beta(k) = 0.3 * n01(rng);
  const CumulativeParams truth{make_thresholds(J, link), beta};
  Eigen::MatrixXd a = fitted_probabilities(truth, link, x);
  // perturb so the projection is not exactly realizable
  for (int i = 0; i < n; ++i) {
    a.row(i).array() += 0.02;
    a.row(i) /= a.row(i).sum();
  }
  const AugmentedDataset aug(x, a);
  for (auto _ : state) benchmark::DoNotOptimize(project_cluster(aug, FamilyKind::cumulative, link));
}
BENCHMARK(BM_ProjectCluster)->Arg(1)->Arg(5)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_ProjectCategorical(benchmark::State& state) {
  const int n = 100, d = static_cast<int>(state.range(0)), J = 3;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Eigen::MatrixXd x(n, d), a(n, J);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) x(i, k) = n01(rng);
    for (int j = 0; j < J; ++j) a(i, j) = u(rng);
    a.row(i) /= a.row(i).sum();
  }
  const AugmentedDataset aug(x, a);
  for (auto _ : state) benchmark::DoNotOptimize(project_cluster(aug, FamilyKind::categorical, Link()));
}
BENCHMARK(BM_ProjectCategorical)->Arg(2)->Arg(8)->Unit(benchmark::kMicrosecond);

}  // namespace
