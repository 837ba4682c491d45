#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"
#include "projsel/simulation.hpp"

namespace projsel {

SimIterationResult run_iteration(const SimConfig& cfg, int iteration) {
  SimIterationResult out;
  out.iteration = iteration;
  out.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(iteration));
  try {
    const Link link(cfg.link);
    const Eigen::VectorXd zeta = make_thresholds(cfg.categories, link);
    const double sigma = std::sqrt(pseudo_variance(zeta, link));
    const double t0 = tau0(cfg.p0, cfg.predictors, sigma, cfg.observations);
    out.beta = draw_rhs_coefficients(cfg.predictors, t0, cfg.horseshoe, derive_seed(out.seed, 1));
    const Dataset train =
        generate_dataset(out.beta, zeta, link, cfg.observations, derive_seed(out.seed, 2));
    const Dataset test =
        generate_dataset(out.beta, zeta, link, cfg.observations, derive_seed(out.seed, 3));
    const DrawSet draws = fit_reference_laplace(
        train, FamilyKind::cumulative, link,
        ReferencePrior{cfg.threshold_prior_sd, t0 * cfg.coefficient_prior_scale},
        cfg.reference_draws, derive_seed(out.seed, 4));
    out.train_checksum = dataset_checksum(train);
    out.test_checksum = dataset_checksum(test);
    out.draws_checksum = draws_checksum(draws);

    const Eigen::MatrixXd reference_test = predictive_tensor(draws, test, link).mean();
    ReferenceSettings reference;
    reference.search_clusters = cfg.search_clusters;
    reference.eval_draws = cfg.eval_draws;
    reference.seed = derive_seed(out.seed, 5);
    SearchSettings settings;
    settings.family = FamilyKind::cumulative;
    settings.link = cfg.link;
    settings.max_size = cfg.max_size;

    auto timed = [&](SearchMethod method, double& minutes) {
      settings.method = method;
      const auto start = std::chrono::steady_clock::now();
      VarselResult r = varsel(train, draws, test, settings, reference, reference_test);
      minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() /
                60.0;
      return r;
    };
    VarselResult aug = timed(SearchMethod::augmented, out.runtime_augmented);
    VarselResult lat = timed(SearchMethod::latent, out.runtime_latent);
    out.suggested_augmented = suggest_size(aug.stats.sizes, cfg.multiplier);
    out.suggested_latent = suggest_size(lat.stats.sizes, cfg.multiplier);
    out.augmented = std::move(aug.stats);
    out.latent = std::move(lat.stats);
    out.augmented_path = std::move(aug.path);
    out.latent_path = std::move(lat.path);
    out.ok = true;
  } catch (const Error& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

std::vector<SimIterationResult> run_study(const SimConfig& cfg) {
  cfg.validate();
  std::vector<SimIterationResult> results(static_cast<std::size_t>(cfg.iterations));
  parallel_for(results.size(), [&](std::size_t r) {
    results[r] = run_iteration(cfg, static_cast<int>(r) + 1);
  });
  const auto failed = std::count_if(results.begin(), results.end(),
                                    [](const SimIterationResult& r) { return !r.ok; });
  if (5 * failed > cfg.iterations) {
    std::string first;
    for (const auto& r : results)
      if (!r.ok) {
        first = "iteration " + std::to_string(r.iteration) + ": " + r.error;
        break;
      }
    throw Error("study aborted: " + std::to_string(failed) + " of " +
                std::to_string(cfg.iterations) + " iterations failed (first failure, " + first +
                ")");
  }
  return results;
}

namespace {

std::string opt_string(const std::optional<int>& v) { return v ? std::to_string(*v) : "NA"; }

// Linear interpolation between order statistics (sample quantile type 7).
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

struct GminRow {
  int iteration;
  std::optional<int> g_aug, g_lat;
  int g_min;
  double mlpd_aug, mlpd_lat, gmpd_aug, gmpd_lat;
};

std::vector<GminRow> gmin_rows(const std::vector<SimIterationResult>& results) {
  std::vector<GminRow> rows;
  for (const auto& r : results) {
    if (!r.ok) continue;
    if (!r.suggested_augmented && !r.suggested_latent) continue;
    int g = std::min(r.suggested_augmented.value_or(INT32_MAX), r.suggested_latent.value_or(INT32_MAX));
    const auto available = static_cast<int>(std::min(r.augmented.sizes.size(), r.latent.sizes.size()));
    if (g >= available) continue;
    const auto& a = r.augmented.sizes[static_cast<std::size_t>(g)];
    const auto& l = r.latent.sizes[static_cast<std::size_t>(g)];
    rows.push_back({r.iteration, r.suggested_augmented, r.suggested_latent, g, a.mlpd, l.mlpd,
                    a.gmpd, l.gmpd});
  }
  return rows;
}

}  // namespace

std::vector<std::pair<std::string, int>> suggested_size_histogram(
    const std::vector<SimIterationResult>& results) {
  std::map<int, int> diffs;
  int na_aug = 0, na_lat = 0, na_both = 0;
  for (const auto& r : results) {
    if (!r.ok) continue;
    if (!r.suggested_augmented && !r.suggested_latent) {
      ++na_both;
    } else if (!r.suggested_augmented) {
      ++na_aug;
    } else if (!r.suggested_latent) {
      ++na_lat;
    } else {
      ++diffs[*r.suggested_latent - *r.suggested_augmented];
    }
  }
  std::vector<std::pair<std::string, int>> out;
  for (const auto& [d, n] : diffs) out.emplace_back(std::to_string(d), n);
  out.emplace_back("NA_aug", na_aug);
  out.emplace_back("NA_lat", na_lat);
  out.emplace_back("NA_both", na_both);
  return out;
}

std::map<std::string, Table> study_tables(const std::vector<SimIterationResult>& results) {
  std::map<std::string, Table> out;
  const auto f = format_double;

  Table& iterations = out["iterations"];
  iterations.header = {"iteration", "method",       "size", "predictor", "mlpd",   "se_mlpd",
                       "delta_mlpd", "se_delta_mlpd", "gmpd", "ref_mlpd",  "ref_gmpd"};
  Table& inputs = out["inputs"];
  inputs.header = {"iteration", "seed", "train_checksum", "test_checksum", "draws_checksum",
                   "suggested_augmented", "suggested_latent"};
  Table& failures = out["failures"];
  failures.header = {"iteration", "error"};

  std::map<int, std::vector<double>> delta_aug, delta_lat;
  Table& fig2 = out["fig2_mlpd_diff"];
  fig2.header = {"iteration", "size", "mlpd_lat_minus_aug", "gmpd_ratio_lat_over_aug"};
  Table& fig3 = out["fig3_se_diff"];
  fig3.header = {"iteration", "size", "se_delta_lat_minus_aug"};

  for (const auto& r : results) {
    const std::string it = std::to_string(r.iteration);
    if (!r.ok) {
      failures.rows.push_back({it, r.error});
      continue;
    }
    inputs.rows.push_back({it, std::to_string(r.seed), hex64(r.train_checksum),
                           hex64(r.test_checksum), hex64(r.draws_checksum),
                           opt_string(r.suggested_augmented), opt_string(r.suggested_latent)});
    auto emit = [&](const char* method, const PerfStats& stats, const SolutionPath& path,
                    std::map<int, std::vector<double>>& deltas) {
      for (const auto& s : stats.sizes) {
        iterations.rows.push_back(
            {it, method, std::to_string(s.size),
             s.size == 0 ? "" : path.names[static_cast<std::size_t>(s.size - 1)], f(s.mlpd),
             f(s.se_mlpd), f(s.delta_mlpd), f(s.se_delta_mlpd), f(s.gmpd), f(stats.ref_mlpd),
             f(stats.ref_gmpd)});
        deltas[s.size].push_back(s.delta_mlpd);
      }
    };
    emit("augmented", r.augmented, r.augmented_path, delta_aug);
    emit("latent", r.latent, r.latent_path, delta_lat);
    const std::size_t common = std::min(r.augmented.sizes.size(), r.latent.sizes.size());
    for (std::size_t g = 0; g < common; ++g) {
      const double d = r.latent.sizes[g].mlpd - r.augmented.sizes[g].mlpd;
      fig2.rows.push_back({it, std::to_string(g), f(d), f(std::exp(d))});
      fig3.rows.push_back(
          {it, std::to_string(g),
           f(r.latent.sizes[g].se_delta_mlpd - r.augmented.sizes[g].se_delta_mlpd)});
    }
  }

  Table& fig1 = out["fig1_delta_mlpd"];
  fig1.header = {"method", "size", "n", "min", "q25", "median", "q75", "max"};
  auto summarize = [&](const char* method, const std::map<int, std::vector<double>>& deltas) {
    for (const auto& [g, v] : deltas)
      fig1.rows.push_back({method, std::to_string(g), std::to_string(v.size()),
                           f(quantile(v, 0.0)), f(quantile(v, 0.25)), f(quantile(v, 0.5)),
                           f(quantile(v, 0.75)), f(quantile(v, 1.0))});
  };
  summarize("augmented", delta_aug);
  summarize("latent", delta_lat);

  Table& fig4 = out["fig4_suggested_size_diff"];
  fig4.header = {"g_lat_minus_g_aug", "count"};
  for (const auto& [label, n] : suggested_size_histogram(results))
    fig4.rows.push_back({label, std::to_string(n)});

  const std::vector<GminRow> gmin = gmin_rows(results);
  Table& fig5 = out["fig5_gmin"];
  fig5.header = {"iteration", "g_aug",    "g_lat",    "g_min",    "mlpd_aug",
                 "mlpd_lat",  "mlpd_diff", "gmpd_aug", "gmpd_lat", "gmpd_diff"};
  for (const auto& row : gmin)
    fig5.rows.push_back({std::to_string(row.iteration), opt_string(row.g_aug),
                         opt_string(row.g_lat), std::to_string(row.g_min), f(row.mlpd_aug),
                         f(row.mlpd_lat), f(row.mlpd_lat - row.mlpd_aug), f(row.gmpd_aug),
                         f(row.gmpd_lat), f(row.gmpd_lat - row.gmpd_aug)});

  std::vector<GminRow> sorted = gmin;
  std::stable_sort(sorted.begin(), sorted.end(), [](const GminRow& a, const GminRow& b) {
    return a.gmpd_lat - a.gmpd_aug < b.gmpd_lat - b.gmpd_aug;
  });
  auto extreme = [&](Table& t, bool smallest) {
    t.header = {"iteration", "gmpd_aug", "gmpd_lat", "gmpd_lat_minus_aug"};
    const std::size_t n = std::min<std::size_t>(3, sorted.size());
    for (std::size_t k = 0; k < n; ++k) {
      const GminRow& row = smallest ? sorted[k] : sorted[sorted.size() - 1 - k];
      t.rows.push_back({std::to_string(row.iteration), f(row.gmpd_aug), f(row.gmpd_lat),
                        f(row.gmpd_lat - row.gmpd_aug)});
    }
  };
  extreme(out["table_gmin_smallest"], true);
  extreme(out["table_gmin_largest"], false);
  return out;
}

Table runtime_table(const std::vector<SimIterationResult>& results) {
  Table t;
  t.header = {"iteration", "runtime_augmented_min", "runtime_latent_min"};
  for (const auto& r : results)
    if (r.ok)
      t.rows.push_back({std::to_string(r.iteration), format_double(r.runtime_augmented),
                        format_double(r.runtime_latent)});
  return t;
}

}  // namespace projsel
