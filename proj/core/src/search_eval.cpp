#include "projsel/search_eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"

namespace projsel {

std::string_view to_string(SearchMethod method) {
  return method == SearchMethod::augmented ? "augmented" : "latent";
}

SearchMethod parse_search_method(std::string_view name) {
  if (name == "augmented") return SearchMethod::augmented;
  if (name == "latent") return SearchMethod::latent;
  throw InvalidParameter("unknown search method '" + std::string(name) + "'");
}

int default_max_size(int predictors) { return std::min(predictors, 19); }

std::vector<int> SolutionPath::subset(int g) const {
  if (g < 0 || g > size()) throw InvalidParameter("submodel size outside the solution path");
  return {order.begin(), order.begin() + g};
}

namespace {

int resolve_max_size(const SearchSettings& settings, int predictors) {
  if (settings.max_size < 0) return default_max_size(predictors);
  if (settings.max_size > predictors)
    throw InvalidParameter("maximum submodel size " + std::to_string(settings.max_size) +
                           " exceeds the number of predictors " + std::to_string(predictors));
  return settings.max_size;
}

struct Candidate {
  bool ok = false;
  double objective = -std::numeric_limits<double>::infinity();
  std::string failure;
};

}  // namespace

SolutionPath forward_search(const Dataset& data, const ClusteredReference& search_reference,
                            const DrawSet* draws, const SearchSettings& settings) {
  const int P = data.cols();
  const int G = resolve_max_size(settings, P);
  const Link link(settings.link);

  std::optional<LatentReference> latent;
  if (settings.method == SearchMethod::latent) {
    if (draws == nullptr)
      throw InvalidParameter("latent search needs cumulative-params reference draws");
    latent = latent_reference(data, *draws, search_reference);
  }

  auto score = [&](const std::vector<int>& subset) {
    if (latent) return -latent_project(data, *latent, subset).weighted_rss();
    return project(data, search_reference, subset, settings.family, link, settings.newton)
        .weighted_objective();
  };

  SolutionPath path;
  path.method = settings.method;
  path.objective.push_back(score({}));

  std::vector<bool> used(static_cast<std::size_t>(P), false);
  for (int g = 1; g <= G; ++g) {
    std::vector<int> candidates;
    for (int p = 0; p < P; ++p)
      if (!used[static_cast<std::size_t>(p)]) candidates.push_back(p);

    std::vector<Candidate> results(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t k) {
      std::vector<int> subset = path.order;
      subset.push_back(candidates[k]);
      try {
        results[k].objective = score(subset);
        results[k].ok = std::isfinite(results[k].objective);
        if (!results[k].ok) results[k].failure = "objective is not finite";
      } catch (const NumericalError& e) {
        results[k].failure = e.what();
      }
    });

    int best = -1;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      const int col = candidates[k];
      if (!results[k].ok) {
        path.warnings.push_back("size " + std::to_string(g) + ": candidate '" +
                                data.column_names[static_cast<std::size_t>(col)] +
                                "' skipped: " + results[k].failure);
        continue;
      }
      // Candidates are in ascending column order, so strict > keeps the lowest index on ties.
      if (best < 0 || results[k].objective > results[static_cast<std::size_t>(best)].objective)
        best = static_cast<int>(k);
    }
    if (best < 0) {
      path.truncated = true;
      path.warnings.push_back("search truncated at size " + std::to_string(g - 1) +
                              ": every candidate projection failed");
      break;
    }
    const int chosen = candidates[static_cast<std::size_t>(best)];
    used[static_cast<std::size_t>(chosen)] = true;
    path.order.push_back(chosen);
    path.names.push_back(data.column_names[static_cast<std::size_t>(chosen)]);
    path.objective.push_back(results[static_cast<std::size_t>(best)].objective);
  }
  return path;
}

double standard_error(const Eigen::VectorXd& values) {
  const Eigen::Index n = values.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) sum += values[i];
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ss += (values[i] - mean) * (values[i] - mean);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

namespace {

double ordered_mean(const Eigen::VectorXd& values) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) sum += values[i];
  return sum / static_cast<double>(values.size());
}

}  // namespace

Eigen::VectorXd observed_log_probs(const Eigen::MatrixXd& probs, const std::vector<int>& y) {
  if (static_cast<std::size_t>(probs.rows()) != y.size())
    throw DataError("predictions and responses disagree on the number of observations");
  Eigen::VectorXd out(probs.rows());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const int code = y[static_cast<std::size_t>(i)];
    if (code < 1 || code > probs.cols())
      throw DataError("response category " + std::to_string(code) + " at test row " +
                      std::to_string(i + 1) + " is outside 1.." + std::to_string(probs.cols()));
    out[i] = std::log(std::max(probs(i, code - 1), kProbabilityFloor));
  }
  return out;
}

PerfStats summarize_lpd(Eigen::MatrixXd lpd, Eigen::VectorXd ref_lpd) {
  if (lpd.cols() != ref_lpd.size() || ref_lpd.size() == 0)
    throw DataError("lpd matrix and reference lpds disagree on the number of observations");
  PerfStats out;
  out.ref_mlpd = ordered_mean(ref_lpd);
  out.ref_se_mlpd = standard_error(ref_lpd);
  out.ref_gmpd = std::exp(out.ref_mlpd);
  for (Eigen::Index g = 0; g < lpd.rows(); ++g) {
    const Eigen::VectorXd row = lpd.row(g).transpose();
    SizeStats s;
    s.size = static_cast<int>(g);
    s.mlpd = ordered_mean(row);
    s.se_mlpd = standard_error(row);
    s.delta_mlpd = s.mlpd - out.ref_mlpd;
    s.se_delta_mlpd = standard_error(row - ref_lpd);
    s.gmpd = std::exp(s.mlpd);
    out.sizes.push_back(s);
  }
  out.lpd = std::move(lpd);
  out.ref_lpd = std::move(ref_lpd);
  return out;
}

PerfStats evaluate(const SolutionPath& path, const Dataset& train,
                   const ClusteredReference& eval_reference, const DrawSet* draws,
                   const Dataset& test, const Eigen::MatrixXd& reference_test_probs,
                   const SearchSettings& settings) {
  if (test.rows() == 0) throw DataError("test dataset is empty");
  if (reference_test_probs.rows() != test.rows())
    throw DataError("reference test probabilities do not match the test dataset");
  for (Eigen::Index i = 0; i < reference_test_probs.rows(); ++i)
    if (std::abs(reference_test_probs.row(i).sum() - 1.0) > 1e-6)
      throw DataError("reference test probabilities in row " + std::to_string(i + 1) +
                      " do not sum to one");
  const Link link(settings.link);

  std::optional<LatentReference> latent;
  if (path.method == SearchMethod::latent) {
    if (draws == nullptr)
      throw InvalidParameter("latent evaluation needs cumulative-params reference draws");
    latent = latent_reference(train, *draws, eval_reference);
  }

  const Eigen::VectorXd ref_lpd = observed_log_probs(reference_test_probs, test.y);
  Eigen::MatrixXd lpd(path.size() + 1, test.rows());
  parallel_for(static_cast<std::size_t>(path.size() + 1), [&](std::size_t g) {
    const std::vector<int> subset = path.subset(static_cast<int>(g));
    Eigen::MatrixXd probs;
    if (latent) {
      probs = latent_predict_response(latent_project(train, *latent, subset), test, link);
    } else {
      probs = submodel_predict(
          project(train, eval_reference, subset, settings.family, link, settings.newton), test);
    }
    lpd.row(static_cast<Eigen::Index>(g)) = observed_log_probs(probs, test.y).transpose();
  });
  return summarize_lpd(std::move(lpd), ref_lpd);
}

std::optional<int> suggest_size(const std::vector<SizeStats>& stats, double multiplier) {
  for (const auto& s : stats)
    if (s.delta_mlpd >= -multiplier * s.se_delta_mlpd) return s.size;
  return std::nullopt;
}

VarselResult varsel(const Dataset& train, const DrawSet& draws, const Dataset& test,
                    const SearchSettings& settings, const ReferenceSettings& reference,
                    Eigen::MatrixXd reference_test_probs) {
  const Link link(settings.link);
  const ProbabilityTensor tensor = predictive_tensor(draws, train, link);
  const int S = tensor.draws();
  const int search_clusters = std::min(reference.search_clusters, S);
  const int eval_draws = std::min(reference.eval_draws, S);
  if (search_clusters < 1 || eval_draws < 1)
    throw InvalidParameter("cluster counts must be positive");

  const ClusteredReference search_reference =
      cluster_draws(tensor, clustering_features(draws, train, link), search_clusters,
                    reference.seed, reference.kmeans);
  const ClusteredReference eval_reference = thin_draws(tensor, eval_draws);

  if (reference_test_probs.size() == 0) {
    if (draws.kind() == DrawKind::prob_tensor)
      throw DataError("a prob-tensor reference needs explicit test-set reference probabilities");
    reference_test_probs = predictive_tensor(draws, test, link).mean();
  }

  VarselResult out;
  out.path = forward_search(train, search_reference, &draws, settings);
  out.stats = evaluate(out.path, train, eval_reference, &draws, test, reference_test_probs,
                       settings);
  return out;
}

std::vector<int> stratified_folds(const std::vector<int>& y, int categories, int folds,
                                  std::uint64_t seed) {
  if (folds < 2 || folds > static_cast<int>(y.size()))
    throw InvalidParameter("number of folds must lie in [2, N]");
  std::mt19937_64 rng(seed);
  std::vector<int> fold_of(y.size(), -1);
  int next = 0;
  for (int j = 1; j <= categories; ++j) {
    std::vector<int> members;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] == j) members.push_back(static_cast<int>(i));
    // Fisher-Yates with an explicit generator keeps the order portable.
    for (std::size_t k = members.size(); k > 1; --k) {
      const std::size_t r = static_cast<std::size_t>(rng() % k);
      std::swap(members[k - 1], members[r]);
    }
    for (int i : members) {
      fold_of[static_cast<std::size_t>(i)] = next;
      next = (next + 1) % folds;
    }
  }
  return fold_of;
}

KFoldResult kfold_evaluate(const Dataset& data, const DrawsProvider& provider, int folds,
                           const SearchSettings& settings, const ReferenceSettings& reference,
                           std::vector<int> fold_of) {
  const int N = data.rows();
  const int J = data.categories();
  if (folds < 2 || folds > N) throw InvalidParameter("number of folds must lie in [2, N]");
  if (fold_of.empty()) {
    fold_of = stratified_folds(data.y, J, folds, derive_seed(reference.seed, 0xF01DULL));
  }
  if (static_cast<int>(fold_of.size()) != N)
    throw DataError("fold assignment length does not match the dataset");

  std::vector<std::vector<int>> train_rows(static_cast<std::size_t>(folds));
  std::vector<std::vector<int>> test_rows(static_cast<std::size_t>(folds));
  for (int i = 0; i < N; ++i) {
    const int f = fold_of[static_cast<std::size_t>(i)];
    if (f < 0 || f >= folds) throw DataError("fold id out of range at row " + std::to_string(i + 1));
    for (int k = 0; k < folds; ++k)
      (k == f ? test_rows : train_rows)[static_cast<std::size_t>(k)].push_back(i);
  }
  for (int k = 0; k < folds; ++k) {
    if (test_rows[static_cast<std::size_t>(k)].empty())
      throw DataError("fold " + std::to_string(k + 1) + " is empty");
    std::vector<bool> seen(static_cast<std::size_t>(J), false);
    for (int i : train_rows[static_cast<std::size_t>(k)])
      seen[static_cast<std::size_t>(data.y[static_cast<std::size_t>(i)] - 1)] = true;
    for (int j = 0; j < J; ++j)
      if (!seen[static_cast<std::size_t>(j)])
        throw DataError("training portion of fold " + std::to_string(k + 1) +
                        " has no observation in category " + std::to_string(j + 1) +
                        "; use a smaller K");
  }

  std::vector<VarselResult> results(static_cast<std::size_t>(folds));
  parallel_for(static_cast<std::size_t>(folds), [&](std::size_t k) {
    const Dataset train = data.subset_rows(train_rows[k]);
    const Dataset test = data.subset_rows(test_rows[k]);
    const DrawSet draws = provider(static_cast<int>(k), train);
    ReferenceSettings fold_reference = reference;
    fold_reference.seed = derive_seed(reference.seed, k + 1);
    results[k] = varsel(train, draws, test, settings, fold_reference);
  });

  KFoldResult out;
  out.fold_of = fold_of;
  int sizes = std::numeric_limits<int>::max();
  for (const auto& r : results) sizes = std::min(sizes, r.path.size() + 1);
  Eigen::MatrixXd lpd(sizes, N);
  Eigen::VectorXd ref_lpd(N);
  for (int k = 0; k < folds; ++k) {
    const auto& r = results[static_cast<std::size_t>(k)];
    const auto& rows = test_rows[static_cast<std::size_t>(k)];
    for (std::size_t t = 0; t < rows.size(); ++t) {
      const auto col = static_cast<Eigen::Index>(t);
      lpd.col(rows[t]) = r.stats.lpd.col(col).head(sizes);
      ref_lpd[rows[t]] = r.stats.ref_lpd[col];
    }
    out.fold_paths.push_back(r.path);
  }
  out.stats = summarize_lpd(std::move(lpd), std::move(ref_lpd));

  const DrawSet full_draws = provider(-1, data);
  const Link link(settings.link);
  const ProbabilityTensor tensor = predictive_tensor(full_draws, data, link);
  const ClusteredReference search_reference = cluster_draws(
      tensor, clustering_features(full_draws, data, link),
      std::min(reference.search_clusters, tensor.draws()), reference.seed, reference.kmeans);
  out.full_path = forward_search(data, search_reference, &full_draws, settings);
  return out;
}

AgreementTable fold_agreement(const std::vector<SolutionPath>& fold_paths,
                              const SolutionPath& full_path) {
  if (fold_paths.empty()) throw InvalidParameter("fold agreement needs at least one fold path");
  AgreementTable out;
  out.predictors = full_path.names;
  const int G = full_path.size();
  out.proportion = Eigen::MatrixXd::Zero(G, G);
  for (const auto& path : fold_paths) {
    for (int g = 0; g < std::min(G, path.size()); ++g) {
      const auto& name = path.names[static_cast<std::size_t>(g)];
      for (int p = 0; p < G; ++p)
        if (out.predictors[static_cast<std::size_t>(p)] == name) out.proportion(g, p) += 1.0;
    }
  }
  out.proportion /= static_cast<double>(fold_paths.size());
  return out;
}

}  // namespace projsel
