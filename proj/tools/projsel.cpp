// projsel: projection predictive variable selection for ordinal and nominal
// responses.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "projsel/errors.hpp"
#include "projsel/io.hpp"
#include "projsel/parallel.hpp"
#include "projsel/projection.hpp"
#include "projsel/search_eval.hpp"
#include "projsel/simulation.hpp"
#include "projsel/svg.hpp"

namespace fs = std::filesystem;
using namespace projsel;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

using Overrides = std::vector<std::function<void(RunConfig&)>>;

template <typename T, typename Set>
void bind_option(CLI::App* app, Overrides& overrides, const std::string& name, Set set,
          const std::string& help) {
  auto value = std::make_shared<T>();
  CLI::Option* opt = app->add_option(name, *value, help);
  overrides.push_back([opt, value, set](RunConfig& cfg) {
    if (opt->count() > 0) set(cfg, *value);
  });
}

struct Common {
  std::string config;
  Overrides overrides;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON run config (strict keys)");
  auto& o = c.overrides;
  bind_option<std::string>(app, o, "--train", [](RunConfig& r, const std::string& v) { r.train = v; },
                    "training data CSV");
  bind_option<std::string>(app, o, "--test", [](RunConfig& r, const std::string& v) { r.test = v; },
                    "test data CSV");
  bind_option<std::string>(app, o, "--draws", [](RunConfig& r, const std::string& v) { r.draws = v; },
                    "reference draws CSV");
  bind_option<std::string>(app, o, "--draws-kind",
                    [](RunConfig& r, const std::string& v) {
                      parse_draw_kind(v);
                      r.draws_kind = v;
                    },
                    "cumulative-params, categorical-params or prob-tensor");
  bind_option<std::string>(app, o, "--test-probs",
                    [](RunConfig& r, const std::string& v) { r.test_probs = v; },
                    "reference probabilities on the test data (prob-tensor CSV)");
  bind_option<std::string>(app, o, "--out", [](RunConfig& r, const std::string& v) { r.out_dir = v; },
                    "output directory");
  bind_option<std::string>(app, o, "--family",
                    [](RunConfig& r, const std::string& v) { r.family = parse_family(v); },
                    "cumulative or categorical");
  bind_option<std::string>(app, o, "--link",
                    [](RunConfig& r, const std::string& v) { r.link = parse_link(v); },
                    "probit or logit");
  bind_option<std::string>(app, o, "--response",
                    [](RunConfig& r, const std::string& v) { r.data.response = v; },
                    "response column name");
  bind_option<std::vector<std::string>>(
      app, o, "--categories",
      [](RunConfig& r, const std::vector<std::string>& v) { r.data.categories = v; },
      "ordered response category labels");
  bind_option<std::vector<std::string>>(
      app, o, "--predictors",
      [](RunConfig& r, const std::vector<std::string>& v) { r.data.predictors = v; },
      "predictor columns (default: all but the response)");
  bind_option<std::uint64_t>(app, o, "--seed", [](RunConfig& r, std::uint64_t v) { r.seed = v; },
                      "master seed");
}

void add_search_options(CLI::App* app, Common& c) {
  auto& o = c.overrides;
  bind_option<int>(app, o, "--search-clusters", [](RunConfig& r, int v) { r.search_clusters = v; },
            "clusters used during the search");
  bind_option<int>(app, o, "--eval-draws", [](RunConfig& r, int v) { r.eval_draws = v; },
            "thinned draws used for the final statistics");
  bind_option<int>(app, o, "--max-size", [](RunConfig& r, int v) { r.max_size = v; },
            "largest submodel size (default min(P, 19))");
  bind_option<std::string>(app, o, "--method",
                    [](RunConfig& r, const std::string& v) {
                      if (v != "augmented" && v != "latent" && v != "both")
                        throw InvalidParameter("method must be augmented, latent or both");
                      r.method = v;
                    },
                    "augmented, latent or both");
  bind_option<double>(app, o, "--multiplier", [](RunConfig& r, double v) { r.multiplier = v; },
               "SE multiplier of the size heuristic");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  for (const auto& apply : c.overrides) apply(cfg);
  return cfg;
}

void require(const std::string& value, const char* what) {
  if (value.empty()) throw InvalidParameter(std::string("missing required setting: ") + what);
}

SearchSettings search_settings(const RunConfig& cfg, SearchMethod method) {
  SearchSettings s;
  s.family = cfg.family;
  s.link = cfg.link;
  s.method = method;
  s.max_size = cfg.max_size;
  return s;
}

ReferenceSettings reference_settings(const RunConfig& cfg) {
  ReferenceSettings r;
  r.search_clusters = cfg.search_clusters;
  r.eval_draws = cfg.eval_draws;
  r.seed = cfg.seed;
  return r;
}

std::vector<SearchMethod> methods_of(const RunConfig& cfg) {
  if (cfg.method == "both") return {SearchMethod::augmented, SearchMethod::latent};
  return {parse_search_method(cfg.method)};
}

void write_metadata(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    std::vector<fs::path> inputs, std::vector<std::string> warnings = {}) {
  RunMetadata meta;
  meta.command = command;
  meta.config_json = run_config_json(cfg);
  meta.seeds["master"] = cfg.seed;
  meta.inputs = std::move(inputs);
  meta.warnings = std::move(warnings);
  write_text_atomic(dir / "metadata.json", metadata_json(meta));
}

// ------------------------------------------------------------------ project

int run_project(const Common& c) {
  const RunConfig cfg = resolve(c);
  require(cfg.train, "train");
  require(cfg.draws, "draws");
  require(cfg.out_dir, "out");
  const Dataset data = load_dataset(cfg.train, cfg.data);
  const DrawSet draws = load_draws(cfg.draws, parse_draw_kind(cfg.draws_kind));
  const Link link(cfg.link);
  const ProbabilityTensor tensor = predictive_tensor(draws, data, link);
  const ClusteredReference clustered = cluster_draws(
      tensor, clustering_features(draws, data, link), std::min(cfg.clusters, tensor.draws()),
      cfg.seed);
  std::vector<int> subset;
  for (const auto& name : cfg.subset) subset.push_back(data.column_index(name));
  const ProjectedSubmodel proj = project(data, clustered, subset, cfg.family, link);
  const fs::path out(cfg.out_dir);
  write_text_atomic(out / "projection.json", projection_json(proj));
  write_metadata(out, "project", cfg, {cfg.train, cfg.draws});
  return kOk;
}

// ------------------------------------------------------------------- varsel

int run_varsel(const Common& c) {
  const RunConfig cfg = resolve(c);
  require(cfg.train, "train");
  require(cfg.test, "test");
  require(cfg.draws, "draws");
  require(cfg.out_dir, "out");
  const Dataset train = load_dataset(cfg.train, cfg.data);
  DatasetSpec test_spec = cfg.data;
  if (test_spec.categories.empty()) test_spec.category_count = train.categories();
  const Dataset test = load_dataset(cfg.test, test_spec);
  const DrawSet draws = load_draws(cfg.draws, parse_draw_kind(cfg.draws_kind));
  std::vector<fs::path> inputs{cfg.train, cfg.test, cfg.draws};

  Eigen::MatrixXd test_probs;
  if (!cfg.test_probs.empty()) {
    const DrawSet t = load_draws(cfg.test_probs, DrawKind::prob_tensor);
    test_probs = t.tensor().mean();
    inputs.emplace_back(cfg.test_probs);
  }

  const fs::path out(cfg.out_dir);
  std::vector<std::string> warnings;
  const auto methods = methods_of(cfg);
  for (SearchMethod m : methods) {
    const VarselResult r = varsel(train, draws, test, search_settings(cfg, m),
                                  reference_settings(cfg), test_probs);
    const std::string suffix = methods.size() > 1 ? "_" + std::string(to_string(m)) : "";
    write_csv(out / ("path" + suffix + ".csv"), path_table(r.path));
    save_stats(out / ("stats" + suffix + ".csv"), r.stats);
    warnings.insert(warnings.end(), r.path.warnings.begin(), r.path.warnings.end());
    const auto g = suggest_size(r.stats.sizes, cfg.multiplier);
    std::cout << to_string(m) << ": path";
    for (const auto& name : r.path.names) std::cout << ' ' << name;
    std::cout << "; suggested size " << (g ? std::to_string(*g) : "NA") << '\n';
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  write_metadata(out, "varsel", cfg, inputs, warnings);
  return kOk;
}

// ---------------------------------------------------------------- cv-varsel

std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos;
       pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
  return text;
}

DrawsProvider make_provider(const RunConfig& cfg, const fs::path& out) {
  const DrawKind kind = parse_draw_kind(cfg.draws_kind);
  if (!cfg.draws_dir.empty()) {
    const fs::path dir(cfg.draws_dir);
    return [dir, kind](int fold, const Dataset&) {
      const fs::path file =
          dir / (fold < 0 ? std::string("full.csv") : "fold_" + std::to_string(fold + 1) + ".csv");
      return load_draws(file, kind);
    };
  }
  if (!cfg.refit_cmd.empty()) {
    const std::string response = cfg.data.response;
    return [cfg, kind, out, response](int fold, const Dataset& train) {
      const std::string stem = fold < 0 ? std::string("full") : "fold_" + std::to_string(fold + 1);
      const fs::path train_file = out / "folds" / (stem + "_train.csv");
      const fs::path draws_file = out / "folds" / (stem + "_draws.csv");
      save_dataset(train_file, train, response);
      std::string cmd = substitute(cfg.refit_cmd, "{train}", train_file.string());
      cmd = substitute(cmd, "{out}", draws_file.string());
      const int status = std::system(cmd.c_str());
      if (status != 0)
        throw DataError("refit command failed for " + stem + " (status " +
                        std::to_string(status) + "): " + cmd);
      return load_draws(draws_file, kind);
    };
  }
  if (kind == DrawKind::prob_tensor)
    throw InvalidParameter("internal refit cannot produce prob-tensor draws");
  const ReferencePrior prior{cfg.intercept_prior_sd, cfg.coefficient_prior_sd};
  return [cfg, prior](int fold, const Dataset& train) {
    return fit_reference_laplace(train, cfg.family, Link(cfg.link), prior, cfg.refit_draws,
                                 derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(fold + 1)));
  };
}

int run_cv_varsel(const Common& c) {
  const RunConfig cfg = resolve(c);
  require(cfg.train, "train");
  require(cfg.out_dir, "out");
  const Dataset data = load_dataset(cfg.train, cfg.data);
  const fs::path out(cfg.out_dir);
  std::vector<int> folds;
  std::vector<fs::path> inputs{cfg.train};
  if (!cfg.folds_file.empty()) {
    folds = load_folds(cfg.folds_file, data.rows());
    inputs.emplace_back(cfg.folds_file);
  }
  const DrawsProvider provider = make_provider(cfg, out);

  std::vector<std::string> warnings;
  const auto methods = methods_of(cfg);
  for (SearchMethod m : methods) {
    const KFoldResult r = kfold_evaluate(data, provider, cfg.folds, search_settings(cfg, m),
                                         reference_settings(cfg), folds);
    const std::string suffix = methods.size() > 1 ? "_" + std::string(to_string(m)) : "";
    save_stats(out / ("stats" + suffix + ".csv"), r.stats);
    write_csv(out / ("path" + suffix + ".csv"), path_table(r.full_path));
    Table fold_paths;
    fold_paths.header = {"fold", "size", "predictor"};
    for (std::size_t k = 0; k < r.fold_paths.size(); ++k) {
      const auto& p = r.fold_paths[k];
      for (int g = 0; g < p.size(); ++g)
        fold_paths.rows.push_back({std::to_string(k + 1), std::to_string(g + 1),
                                   p.names[static_cast<std::size_t>(g)]});
      warnings.insert(warnings.end(), p.warnings.begin(), p.warnings.end());
    }
    write_csv(out / ("fold_paths" + suffix + ".csv"), fold_paths);
    write_csv(out / ("agreement" + suffix + ".csv"),
              agreement_table(fold_agreement(r.fold_paths, r.full_path)));
    Table fold_table;
    fold_table.header = {"fold"};
    for (int f : r.fold_of) fold_table.rows.push_back({std::to_string(f + 1)});
    write_csv(out / "folds.csv", fold_table);
    const auto g = suggest_size(r.stats.sizes, cfg.multiplier);
    std::cout << to_string(m) << ": path";
    for (const auto& name : r.full_path.names) std::cout << ' ' << name;
    std::cout << "; suggested size " << (g ? std::to_string(*g) : "NA") << '\n';
  }
  write_metadata(out, "cv-varsel", cfg, inputs, warnings);
  return kOk;
}

// ------------------------------------------------------------- suggest-size

int run_suggest(const std::string& stats, double multiplier) {
  const StatsFile s = load_stats(stats);
  const auto g = suggest_size(s.sizes, multiplier);
  std::cout << (g ? std::to_string(*g) : "NA") << '\n';
  return kOk;
}

// ------------------------------------------------------------------ reports

std::vector<double> column_values(const Table& t, const std::string& name) {
  const int c = t.column(name);
  std::vector<double> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back(parse_double(t.rows[r][static_cast<std::size_t>(c)], name, r + 1, name));
  return out;
}

std::string stats_plot(const StatsFile& s, const std::string& title) {
  svg::Series mid{"delta MLPD", {}, {}}, lo{"- 1 SE", {}, {}}, hi{"+ 1 SE", {}, {}};
  for (const auto& row : s.sizes) {
    mid.x.push_back(row.size);
    lo.x.push_back(row.size);
    hi.x.push_back(row.size);
    mid.y.push_back(row.delta_mlpd);
    lo.y.push_back(row.delta_mlpd - row.se_delta_mlpd);
    hi.y.push_back(row.delta_mlpd + row.se_delta_mlpd);
  }
  return svg::line_plot({title, "submodel size", "MLPD - MLPD*", true}, {mid, lo, hi});
}

int run_report(const std::vector<std::string>& stats_files, const std::string& out_dir) {
  for (const auto& file : stats_files) {
    const fs::path p(file);
    write_text_atomic(fs::path(out_dir) / (p.stem().string() + ".svg"),
                      stats_plot(load_stats(p), p.stem().string()));
  }
  return kOk;
}

void study_plots(const std::map<std::string, Table>& tables, const Table& runtimes,
                 const fs::path& out) {
  const Table& it = tables.at("iterations");
  for (const char* method : {"augmented", "latent"}) {
    std::map<std::string, svg::Series> lines;
    const int c_it = it.column("iteration"), c_m = it.column("method"), c_g = it.column("size"),
              c_d = it.column("delta_mlpd");
    for (const auto& row : it.rows) {
      if (row[static_cast<std::size_t>(c_m)] != method) continue;
      auto& s = lines[row[static_cast<std::size_t>(c_it)]];
      s.x.push_back(std::stod(row[static_cast<std::size_t>(c_g)]));
      s.y.push_back(std::stod(row[static_cast<std::size_t>(c_d)]));
    }
    std::vector<svg::Series> series;
    for (auto& [name, s] : lines) {
      s.name = name;
      series.push_back(std::move(s));
    }
    write_text_atomic(out / (std::string("fig1_delta_mlpd_") + method + ".svg"),
                      svg::line_plot({std::string("Delta MLPD, ") + method + " projection",
                                      "submodel size", "MLPD - MLPD*", true},
                                     series));
  }

  auto per_iteration_lines = [&](const Table& t, const std::string& value) {
    std::map<std::string, svg::Series> lines;
    const int c_it = t.column("iteration"), c_g = t.column("size"), c_v = t.column(value);
    for (const auto& row : t.rows) {
      auto& s = lines[row[static_cast<std::size_t>(c_it)]];
      s.x.push_back(std::stod(row[static_cast<std::size_t>(c_g)]));
      s.y.push_back(std::stod(row[static_cast<std::size_t>(c_v)]));
    }
    return lines;
  };
  {
    std::vector<svg::Series> series;
    for (auto& [name, s] : per_iteration_lines(tables.at("fig2_mlpd_diff"), "mlpd_lat_minus_aug")) {
      s.name = name;
      series.push_back(s);
    }
    write_text_atomic(out / "fig2_mlpd_diff.svg",
                      svg::line_plot({"MLPD latent minus augmented", "submodel size",
                                      "MLPD_lat - MLPD_aug", true},
                                     series));
  }
  {
    std::map<int, std::vector<double>> by_size;
    const Table& t = tables.at("fig3_se_diff");
    const int c_g = t.column("size"), c_v = t.column("se_delta_lat_minus_aug");
    for (const auto& row : t.rows)
      by_size[std::stoi(row[static_cast<std::size_t>(c_g)])].push_back(
          std::stod(row[static_cast<std::size_t>(c_v)]));
    std::vector<std::pair<std::string, std::vector<double>>> groups;
    for (auto& [g, v] : by_size) groups.emplace_back(std::to_string(g), v);
    write_text_atomic(out / "fig3_se_diff.svg",
                      svg::box_plot({"SE(Delta MLPD) latent minus augmented", "submodel size",
                                     "SE difference", true},
                                    groups));
  }
  {
    std::vector<std::pair<std::string, double>> bars;
    const Table& t = tables.at("fig4_suggested_size_diff");
    for (const auto& row : t.rows) bars.emplace_back(row[0], std::stod(row[1]));
    write_text_atomic(out / "fig4_suggested_size_diff.svg",
                      svg::bar_plot({"Suggested size G_lat - G_aug", "difference", "count"}, bars));
  }
  {
    const Table& t = tables.at("fig5_gmin");
    std::vector<std::pair<std::string, std::vector<double>>> groups{
        {"MLPD_lat - MLPD_aug at G_min", t.rows.empty() ? std::vector<double>{}
                                                         : column_values(t, "mlpd_diff")}};
    write_text_atomic(out / "fig5_gmin.svg",
                      svg::box_plot({"Difference at G_min", "", "MLPD difference", true}, groups));
    std::vector<std::pair<std::string, std::vector<double>>> times{
        {"augmented", runtimes.rows.empty() ? std::vector<double>{}
                                            : column_values(runtimes, "runtime_augmented_min")},
        {"latent", runtimes.rows.empty() ? std::vector<double>{}
                                         : column_values(runtimes, "runtime_latent_min")}};
    write_text_atomic(out / "fig5_runtime.svg",
                      svg::box_plot({"Runtime", "method", "minutes"}, times));
  }
}

int run_simulate(const std::string& config, const std::string& out_dir,
                 const std::vector<std::string>& sets) {
  SimConfig cfg = config.empty() ? SimConfig{} : load_sim_config(config);
  // key=value overrides go through the strict JSON parser as well.
  if (!sets.empty()) {
    std::string merged = sim_config_json(cfg);
    merged.pop_back();  // closing brace
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw InvalidParameter("--set expects key=value, got " + kv);
      merged += ",\n  \"" + kv.substr(0, eq) + "\": " + kv.substr(eq + 1);
    }
    merged += "\n}";
    cfg = parse_sim_config(merged, "--set");
  }
  cfg.validate();
  const fs::path out(out_dir);
  const std::vector<SimIterationResult> results = run_study(cfg);
  const auto tables = study_tables(results);
  for (const auto& [name, table] : tables) write_csv(out / (name + ".csv"), table);
  const Table runtimes = runtime_table(results);
  write_csv(out / "runtimes.csv", runtimes);
  study_plots(tables, runtimes, out);

  const Link link(cfg.link);
  const Eigen::VectorXd zeta = make_thresholds(cfg.categories, link);
  const double sigma2 = pseudo_variance(zeta, link);
  RunMetadata meta;
  meta.command = "simulate";
  meta.config_json = sim_config_json(cfg);
  meta.seeds["master"] = cfg.seed;
  if (!config.empty()) meta.inputs.emplace_back(config);
  meta.notes["pseudo_variance_recipe"] = kPseudoVarianceRecipe;
  meta.notes["pseudo_sd"] = format_double(std::sqrt(sigma2));
  meta.notes["tau0"] = format_double(tau0(cfg.p0, cfg.predictors, std::sqrt(sigma2), cfg.observations));
  meta.notes["reference_fit"] = "Laplace approximation at the penalized mode";
  meta.notes["runtimes"] = "runtimes.csv holds wall-clock minutes and is not reproducible";
  for (const auto& r : results)
    if (!r.ok) meta.warnings.push_back("iteration " + std::to_string(r.iteration) + ": " + r.error);
  write_text_atomic(out / "metadata.json", metadata_json(meta));
  std::cout << "simulate: " << results.size() << " iterations, outputs in " << out.string() << '\n';
  return kOk;
}

int thread_default() {
  if (const char* env = std::getenv("PROJSEL_THREADS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw InvalidParameter(std::string("PROJSEL_THREADS is not an integer: ") + env);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projsel: projection predictive variable selection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("projsel ") + PROJSEL_TOOL_VERSION);
  int threads = -1;
  app.add_option("--threads", threads, "worker threads (0 = hardware; env PROJSEL_THREADS)");

  Common project_opts, varsel_opts, cv_opts;
  auto* project_cmd = app.add_subcommand("project", "project the reference onto one subset");
  add_common(project_cmd, project_opts);
  bind_option<std::vector<std::string>>(
      project_cmd, project_opts.overrides, "--subset",
      [](RunConfig& r, const std::vector<std::string>& v) { r.subset = v; }, "predictor names");
  bind_option<int>(project_cmd, project_opts.overrides, "--clusters",
            [](RunConfig& r, int v) { r.clusters = v; }, "number of clusters C");

  auto* varsel_cmd = app.add_subcommand("varsel", "forward search with test-set evaluation");
  add_common(varsel_cmd, varsel_opts);
  add_search_options(varsel_cmd, varsel_opts);

  auto* cv_cmd = app.add_subcommand("cv-varsel", "K-fold cross-validated variable selection");
  add_common(cv_cmd, cv_opts);
  add_search_options(cv_cmd, cv_opts);
  bind_option<int>(cv_cmd, cv_opts.overrides, "--folds", [](RunConfig& r, int v) { r.folds = v; },
            "number of folds K");
  bind_option<std::string>(cv_cmd, cv_opts.overrides, "--draws-dir",
                    [](RunConfig& r, const std::string& v) { r.draws_dir = v; },
                    "directory with fold_<k>.csv and full.csv draw files");
  bind_option<std::string>(cv_cmd, cv_opts.overrides, "--refit-cmd",
                    [](RunConfig& r, const std::string& v) { r.refit_cmd = v; },
                    "command template with {train} and {out} placeholders");
  bind_option<std::string>(cv_cmd, cv_opts.overrides, "--folds-file",
                    [](RunConfig& r, const std::string& v) { r.folds_file = v; },
                    "CSV with a 1-based 'fold' column");
  bind_option<int>(cv_cmd, cv_opts.overrides, "--refit-draws",
            [](RunConfig& r, int v) { r.refit_draws = v; }, "draws per internal refit");
  bind_option<double>(cv_cmd, cv_opts.overrides, "--coefficient-prior-sd",
               [](RunConfig& r, double v) { r.coefficient_prior_sd = v; },
               "internal refit: coefficient prior sd");

  std::string stats_file;
  double multiplier = 1.0;
  auto* suggest_cmd = app.add_subcommand("suggest-size", "apply the size heuristic to a stats CSV");
  suggest_cmd->add_option("stats", stats_file, "stats CSV")->required();
  suggest_cmd->add_option("--multiplier", multiplier, "SE multiplier");

  std::string sim_config, sim_out;
  std::vector<std::string> sim_sets;
  auto* simulate_cmd = app.add_subcommand("simulate", "run the simulation study");
  simulate_cmd->add_option("--config", sim_config, "JSON study config");
  simulate_cmd->add_option("--out", sim_out, "output directory")->required();
  simulate_cmd->add_option("--set", sim_sets, "override a config key (key=json-value)");

  std::vector<std::string> report_stats;
  std::string report_out;
  auto* report_cmd = app.add_subcommand("report", "render stats CSVs to SVG");
  report_cmd->add_option("--stats", report_stats, "stats CSV files")->required();
  report_cmd->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    set_thread_count(threads >= 0 ? threads : thread_default());
    if (project_cmd->parsed()) return run_project(project_opts);
    if (varsel_cmd->parsed()) return run_varsel(varsel_opts);
    if (cv_cmd->parsed()) return run_cv_varsel(cv_opts);
    if (suggest_cmd->parsed()) return run_suggest(stats_file, multiplier);
    if (simulate_cmd->parsed()) return run_simulate(sim_config, sim_out, sim_sets);
    if (report_cmd->parsed()) return run_report(report_stats, report_out);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
