#include "projsel/io.hpp"

#include <algorithm>
#include <set>
#include <type_traits>

#include "json.hpp"

#include "projsel/errors.hpp"

#ifndef PROJSEL_VERSION
#define PROJSEL_VERSION "unknown"
#endif

namespace projsel {

using nlohmann::json;

// ---------------------------------------------------------------- datasets

Dataset dataset_from_table(const Table& table, const DatasetSpec& spec, const std::string& source) {
  int response_col = -1;
  for (std::size_t k = 0; k < table.header.size(); ++k)
    if (table.header[k] == spec.response) response_col = static_cast<int>(k);
  if (response_col < 0)
    throw DataError(source + ": response column '" + spec.response + "' not found");

  std::vector<int> predictor_cols;
  if (spec.predictors.empty()) {
    for (std::size_t k = 0; k < table.header.size(); ++k)
      if (static_cast<int>(k) != response_col) predictor_cols.push_back(static_cast<int>(k));
  } else {
    for (const auto& name : spec.predictors) {
      auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end())
        throw DataError(source + ": predictor column '" + name + "' not found");
      predictor_cols.push_back(static_cast<int>(it - table.header.begin()));
    }
  }

  Dataset data;
  const auto N = static_cast<Eigen::Index>(table.rows.size());
  data.x.resize(N, static_cast<Eigen::Index>(predictor_cols.size()));
  data.y.resize(table.rows.size());
  for (int col : predictor_cols) data.column_names.push_back(table.header[static_cast<std::size_t>(col)]);

  int max_code = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    for (std::size_t p = 0; p < predictor_cols.size(); ++p) {
      const auto col = static_cast<std::size_t>(predictor_cols[p]);
      data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(p)) =
          parse_double(row[col], source, r + 1, table.header[col]);
    }
    const std::string& cell = row[static_cast<std::size_t>(response_col)];
    if (cell.empty() || cell == "NA")
      throw DataError(source + ": row " + std::to_string(r + 1) + ", column '" + spec.response +
                      "': missing value");
    int code = 0;
    if (!spec.categories.empty()) {
      auto it = std::find(spec.categories.begin(), spec.categories.end(), cell);
      if (it == spec.categories.end())
        throw DataError(source + ": row " + std::to_string(r + 1) + ", column '" +
                        spec.response + "': unknown category '" + cell + "'");
      code = static_cast<int>(it - spec.categories.begin()) + 1;
    } else {
      code = parse_int(cell, source, r + 1, spec.response);
      if (code < 1)
        throw DataError(source + ": row " + std::to_string(r + 1) + ", column '" +
                        spec.response + "': category code must be at least 1");
    }
    max_code = std::max(max_code, code);
    data.y[r] = code;
  }

  if (!spec.categories.empty()) {
    data.category_labels = spec.categories;
  } else {
    const int J = spec.category_count > 0 ? spec.category_count : max_code;
    if (max_code > J)
      throw DataError(source + ": response code " + std::to_string(max_code) +
                      " exceeds the declared " + std::to_string(J) + " categories");
    data.category_labels = default_category_labels(std::max(J, 2));
  }
  data.validate();
  return data;
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSpec& spec) {
  return dataset_from_table(read_csv(path), spec, path.string());
}

Table dataset_table(const Dataset& data, const std::string& response) {
  Table t;
  t.header = data.column_names;
  t.header.push_back(response);
  for (int i = 0; i < data.rows(); ++i) {
    std::vector<std::string> row;
    for (int p = 0; p < data.cols(); ++p) row.push_back(format_double(data.x(i, p)));
    row.push_back(data.category_labels[static_cast<std::size_t>(data.y[static_cast<std::size_t>(i)] - 1)]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  const std::string& response) {
  write_csv(path, dataset_table(data, response));
}

// ------------------------------------------------------------------ draws

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

DrawSet cumulative_from_table(const Table& t, const std::string& source) {
  int zetas = 0;
  while (std::find(t.header.begin(), t.header.end(), "zeta_" + std::to_string(zetas + 1)) !=
         t.header.end())
    ++zetas;
  if (zetas < 1) throw DataError(source + ": no zeta_1 column");
  DrawSet draws;
  std::vector<int> beta_cols;
  for (std::size_t k = 0; k < t.header.size(); ++k) {
    const auto& h = t.header[k];
    if (starts_with(h, "beta_")) {
      beta_cols.push_back(static_cast<int>(k));
      draws.predictor_names.push_back(h.substr(5));
    } else if (!starts_with(h, "zeta_")) {
      throw DataError(source + ": unexpected column '" + h + "'");
    }
  }
  if (static_cast<int>(t.header.size()) != zetas + static_cast<int>(beta_cols.size()))
    throw DataError(source + ": zeta columns must be zeta_1..zeta_{J-1}");
  std::vector<CumulativeParams> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CumulativeParams p;
    p.thresholds.resize(zetas);
    for (int j = 0; j < zetas; ++j) {
      const std::string name = "zeta_" + std::to_string(j + 1);
      p.thresholds[j] = parse_double(t.rows[r][static_cast<std::size_t>(t.column(name))], source,
                                     r + 1, name);
    }
    p.coefficients.resize(static_cast<Eigen::Index>(beta_cols.size()));
    for (std::size_t b = 0; b < beta_cols.size(); ++b) {
      const auto col = static_cast<std::size_t>(beta_cols[b]);
      p.coefficients[static_cast<Eigen::Index>(b)] =
          parse_double(t.rows[r][col], source, r + 1, t.header[col]);
    }
    out.push_back(std::move(p));
  }
  draws.content = std::move(out);
  return draws;
}

DrawSet categorical_from_table(const Table& t, const std::string& source) {
  int J = 1;
  while (std::find(t.header.begin(), t.header.end(), "alpha_" + std::to_string(J + 1)) !=
         t.header.end())
    ++J;
  if (J < 2) throw DataError(source + ": no alpha_2 column");
  DrawSet draws;
  for (const auto& h : t.header) {
    if (starts_with(h, "beta_2_")) draws.predictor_names.push_back(h.substr(7));
    else if (!starts_with(h, "beta_") && !starts_with(h, "alpha_"))
      throw DataError(source + ": unexpected column '" + h + "'");
  }
  const auto P = static_cast<Eigen::Index>(draws.predictor_names.size());
  if (static_cast<Eigen::Index>(t.header.size()) != (J - 1) * (P + 1))
    throw DataError(source + ": expected alpha_k and beta_k_<name> for k = 2.." +
                    std::to_string(J) + " and every predictor");
  std::vector<int> alpha_col(static_cast<std::size_t>(J), -1);
  std::vector<std::vector<int>> beta_col(static_cast<std::size_t>(J));
  for (int k = 2; k <= J; ++k) {
    alpha_col[static_cast<std::size_t>(k - 1)] = t.column("alpha_" + std::to_string(k));
    for (const auto& name : draws.predictor_names)
      beta_col[static_cast<std::size_t>(k - 1)].push_back(
          t.column("beta_" + std::to_string(k) + "_" + name));
  }
  std::vector<CategoricalParams> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    CategoricalParams p;
    p.intercepts = Eigen::VectorXd::Zero(J);
    p.coefficients = Eigen::MatrixXd::Zero(J, P);
    for (int k = 1; k < J; ++k) {
      auto cell = [&](int col) {
        return parse_double(t.rows[r][static_cast<std::size_t>(col)], source, r + 1,
                            t.header[static_cast<std::size_t>(col)]);
      };
      p.intercepts[k] = cell(alpha_col[static_cast<std::size_t>(k)]);
      for (Eigen::Index b = 0; b < P; ++b)
        p.coefficients(k, b) = cell(beta_col[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]);
    }
    out.push_back(std::move(p));
  }
  draws.content = std::move(out);
  return draws;
}

DrawSet tensor_from_table(const Table& t, const std::string& source) {
  const int c_draw = t.column("draw"), c_obs = t.column("obs"), c_cat = t.column("category"),
            c_prob = t.column("prob");
  if (t.header.size() != 4) throw DataError(source + ": expected columns draw,obs,category,prob");
  struct Entry { int s, i, j; double p; };
  std::vector<Entry> entries;
  int S = 0, N = 0, J = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    Entry e{parse_int(row[static_cast<std::size_t>(c_draw)], source, r + 1, "draw"),
            parse_int(row[static_cast<std::size_t>(c_obs)], source, r + 1, "obs"),
            parse_int(row[static_cast<std::size_t>(c_cat)], source, r + 1, "category"),
            parse_double(row[static_cast<std::size_t>(c_prob)], source, r + 1, "prob")};
    if (e.s < 1 || e.i < 1 || e.j < 1)
      throw DataError(source + ": row " + std::to_string(r + 1) + ": indices are 1-based");
    S = std::max(S, e.s);
    N = std::max(N, e.i);
    J = std::max(J, e.j);
    entries.push_back(e);
  }
  if (entries.empty()) throw DataError(source + ": empty probability tensor");
  ProbabilityTensor tensor(S, N, J, -1.0);
  for (const auto& e : entries) {
    double& slot = tensor(e.s - 1, e.i - 1, e.j - 1);
    if (slot != -1.0)
      throw DataError(source + ": duplicate entry (draw " + std::to_string(e.s) + ", obs " +
                      std::to_string(e.i) + ", category " + std::to_string(e.j) + ")");
    slot = e.p;
  }
  if (entries.size() != static_cast<std::size_t>(S) * static_cast<std::size_t>(N) *
                            static_cast<std::size_t>(J))
    throw DataError(source + ": probability tensor is incomplete (expected " +
                    std::to_string(S) + " x " + std::to_string(N) + " x " + std::to_string(J) +
                    " entries)");
  DrawSet draws;
  draws.content = std::move(tensor);
  return draws;
}

}  // namespace

DrawSet draws_from_table(const Table& table, DrawKind kind, const std::string& source) {
  DrawSet draws;
  switch (kind) {
    case DrawKind::cumulative_params: draws = cumulative_from_table(table, source); break;
    case DrawKind::categorical_params: draws = categorical_from_table(table, source); break;
    case DrawKind::prob_tensor: draws = tensor_from_table(table, source); break;
  }
  try {
    draws.validate();
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  }
  // Rows within the 1e-6 tolerance are rescaled so downstream weights sum to 1.
  if (auto* t = std::get_if<ProbabilityTensor>(&draws.content)) {
    for (int s = 0; s < t->draws(); ++s)
      for (int i = 0; i < t->observations(); ++i) {
        auto r = t->row(s, i);
        const double total = r.sum();
        if (std::abs(total - 1.0) > 1e-12) r /= total;
      }
  }
  return draws;
}

DrawSet load_draws(const std::filesystem::path& path, DrawKind kind) {
  return draws_from_table(read_csv(path), kind, path.string());
}

Table draws_table(const DrawSet& draws) {
  Table t;
  const auto f = format_double;
  switch (draws.kind()) {
    case DrawKind::cumulative_params: {
      const auto& d = draws.cumulative();
      const int J = d.empty() ? 2 : d[0].categories();
      for (int j = 1; j < J; ++j) t.header.push_back("zeta_" + std::to_string(j));
      for (const auto& name : draws.predictor_names) t.header.push_back("beta_" + name);
      for (const auto& p : d) {
        std::vector<std::string> row;
        for (Eigen::Index j = 0; j < p.thresholds.size(); ++j) row.push_back(f(p.thresholds[j]));
        for (Eigen::Index b = 0; b < p.coefficients.size(); ++b) row.push_back(f(p.coefficients[b]));
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case DrawKind::categorical_params: {
      const auto& d = draws.categorical();
      const int J = d.empty() ? 2 : d[0].categories();
      for (int k = 2; k <= J; ++k) t.header.push_back("alpha_" + std::to_string(k));
      for (int k = 2; k <= J; ++k)
        for (const auto& name : draws.predictor_names)
          t.header.push_back("beta_" + std::to_string(k) + "_" + name);
      for (const auto& p : d) {
        std::vector<std::string> row;
        for (int k = 1; k < J; ++k) row.push_back(f(p.intercepts[k]));
        for (int k = 1; k < J; ++k)
          for (Eigen::Index b = 0; b < p.coefficients.cols(); ++b) row.push_back(f(p.coefficients(k, b)));
        t.rows.push_back(std::move(row));
      }
      break;
    }
    case DrawKind::prob_tensor: {
      const auto& tensor = draws.tensor();
      t.header = {"draw", "obs", "category", "prob"};
      for (int s = 0; s < tensor.draws(); ++s)
        for (int i = 0; i < tensor.observations(); ++i)
          for (int j = 0; j < tensor.categories(); ++j)
            t.rows.push_back({std::to_string(s + 1), std::to_string(i + 1), std::to_string(j + 1),
                              f(tensor(s, i, j))});
      break;
    }
  }
  return t;
}

void save_draws(const std::filesystem::path& path, const DrawSet& draws) {
  write_csv(path, draws_table(draws));
}

// ------------------------------------------------------------------ stats

Table stats_table(const PerfStats& stats) {
  Table t;
  t.header = {"size", "mlpd", "se_mlpd", "delta_mlpd", "se_delta_mlpd", "gmpd", "ref_mlpd",
              "ref_gmpd"};
  const auto f = format_double;
  for (const auto& s : stats.sizes)
    t.rows.push_back({std::to_string(s.size), f(s.mlpd), f(s.se_mlpd), f(s.delta_mlpd),
                      f(s.se_delta_mlpd), f(s.gmpd), f(stats.ref_mlpd), f(stats.ref_gmpd)});
  return t;
}

void save_stats(const std::filesystem::path& path, const PerfStats& stats) {
  write_csv(path, stats_table(stats));
}

StatsFile stats_from_table(const Table& t, const std::string& source) {
  StatsFile out;
  const int c_size = t.column("size"), c_mlpd = t.column("mlpd"), c_se = t.column("se_mlpd"),
            c_delta = t.column("delta_mlpd"), c_sed = t.column("se_delta_mlpd"),
            c_gmpd = t.column("gmpd"), c_ref = t.column("ref_mlpd"),
            c_refg = t.column("ref_gmpd");
  if (t.rows.empty()) throw DataError(source + ": no statistics rows");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto num = [&](int c) {
      return parse_double(row[static_cast<std::size_t>(c)], source, r + 1,
                          t.header[static_cast<std::size_t>(c)]);
    };
    SizeStats s;
    s.size = parse_int(row[static_cast<std::size_t>(c_size)], source, r + 1, "size");
    s.mlpd = num(c_mlpd);
    s.se_mlpd = num(c_se);
    s.delta_mlpd = num(c_delta);
    s.se_delta_mlpd = num(c_sed);
    s.gmpd = num(c_gmpd);
    out.ref_mlpd = num(c_ref);
    out.ref_gmpd = num(c_refg);
    out.sizes.push_back(s);
  }
  std::sort(out.sizes.begin(), out.sizes.end(),
            [](const SizeStats& a, const SizeStats& b) { return a.size < b.size; });
  return out;
}

StatsFile load_stats(const std::filesystem::path& path) {
  return stats_from_table(read_csv(path), path.string());
}

Table path_table(const SolutionPath& path) {
  Table t;
  t.header = {"size", "predictor", "column_index"};
  for (int g = 0; g < path.size(); ++g)
    t.rows.push_back({std::to_string(g + 1), path.names[static_cast<std::size_t>(g)],
                      std::to_string(path.order[static_cast<std::size_t>(g)] + 1)});
  return t;
}

Table agreement_table(const AgreementTable& table) {
  Table t;
  t.header = {"size"};
  for (const auto& name : table.predictors) t.header.push_back(name);
  for (Eigen::Index g = 0; g < table.proportion.rows(); ++g) {
    std::vector<std::string> row{std::to_string(g + 1)};
    for (Eigen::Index p = 0; p < table.proportion.cols(); ++p)
      row.push_back(format_double(table.proportion(g, p)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<int> load_folds(const std::filesystem::path& path, int observations) {
  const Table t = read_csv(path);
  const int c = t.column("fold");
  if (static_cast<int>(t.rows.size()) != observations)
    throw DataError(path.string() + ": expected " + std::to_string(observations) +
                    " fold ids, found " + std::to_string(t.rows.size()));
  std::vector<int> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back(parse_int(t.rows[r][static_cast<std::size_t>(c)], path.string(), r + 1, "fold") - 1);
  return out;
}

std::string projection_json(const ProjectedSubmodel& proj) {
  json out;
  out["family"] = std::string(to_string(proj.family));
  out["link"] = std::string(to_string(proj.link));
  out["subset"] = proj.subset_names;
  json clusters = json::array();
  for (std::size_t c = 0; c < proj.params.size(); ++c) {
    json entry;
    entry["weight"] = proj.weights[c];
    entry["objective"] = proj.objective[c];
    entry["mean_kl"] = proj.mean_kl[c];
    if (const auto* p = std::get_if<CumulativeParams>(&proj.params[c])) {
      entry["thresholds"] = std::vector<double>(p->thresholds.data(),
                                                p->thresholds.data() + p->thresholds.size());
      entry["coefficients"] = std::vector<double>(p->coefficients.data(),
                                                  p->coefficients.data() + p->coefficients.size());
    } else {
      const auto& q = std::get<CategoricalParams>(proj.params[c]);
      entry["intercepts"] = std::vector<double>(q.intercepts.data(),
                                                q.intercepts.data() + q.intercepts.size());
      json rows = json::array();
      for (Eigen::Index k = 0; k < q.coefficients.rows(); ++k) {
        std::vector<double> row;
        for (Eigen::Index b = 0; b < q.coefficients.cols(); ++b) row.push_back(q.coefficients(k, b));
        rows.push_back(row);
      }
      entry["coefficients"] = rows;
    }
    clusters.push_back(entry);
  }
  out["clusters"] = clusters;
  return out.dump(2) + "\n";
}

// ---------------------------------------------------------------- configs

namespace {

json parse_json_object(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(source + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(source + ": top level must be a JSON object");
  return j;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& source) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw DataError(source + ": unknown config key '" + item.key() + "'");
}

template <typename T>
void take(const json& j, const char* key, T& target, const std::string& source) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  bool ok = true;
  if constexpr (std::is_same_v<T, bool>)
    ok = v.is_boolean();
  else if constexpr (std::is_unsigned_v<T>)
    ok = v.is_number_unsigned();
  else if constexpr (std::is_integral_v<T>)
    ok = v.is_number_integer();
  else if constexpr (std::is_floating_point_v<T>)
    ok = v.is_number();
  if (!ok) throw DataError(source + ": config key '" + std::string(key) + "' has the wrong type");
  try {
    target = v.get<T>();
  } catch (const json::exception&) {
    throw DataError(source + ": config key '" + std::string(key) + "' has the wrong type");
  }
}

template <typename Parse>
void take_enum(const json& j, const char* key, Parse parse, const std::string& source) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string())
    throw DataError(source + ": config key '" + std::string(key) + "' must be a string");
  try {
    parse(j.at(key).get<std::string>());
  } catch (const InvalidParameter& e) {
    throw DataError(source + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& source) {
  const json j = parse_json_object(json_text, source);
  reject_unknown(j,
                 {"family", "link", "search_clusters", "eval_draws", "max_size", "folds", "seed",
                  "method", "multiplier", "response", "categories", "category_count",
                  "predictors", "draws_kind", "subset", "clusters", "refit_draws",
                  "intercept_prior_sd", "coefficient_prior_sd", "train", "test", "draws",
                  "test_probs", "out_dir", "draws_dir", "refit_cmd", "folds_file"},
                 source);
  RunConfig cfg;
  take_enum(j, "family", [&](const std::string& s) { cfg.family = parse_family(s); }, source);
  take_enum(j, "link", [&](const std::string& s) { cfg.link = parse_link(s); }, source);
  take(j, "search_clusters", cfg.search_clusters, source);
  take(j, "eval_draws", cfg.eval_draws, source);
  take(j, "max_size", cfg.max_size, source);
  take(j, "folds", cfg.folds, source);
  take(j, "seed", cfg.seed, source);
  take(j, "method", cfg.method, source);
  if (cfg.method != "augmented" && cfg.method != "latent" && cfg.method != "both")
    throw DataError(source + ": method must be augmented, latent or both");
  take(j, "multiplier", cfg.multiplier, source);
  take(j, "response", cfg.data.response, source);
  take(j, "categories", cfg.data.categories, source);
  take(j, "category_count", cfg.data.category_count, source);
  take(j, "predictors", cfg.data.predictors, source);
  take(j, "draws_kind", cfg.draws_kind, source);
  take_enum(j, "draws_kind", [](const std::string& s) { parse_draw_kind(s); }, source);
  take(j, "subset", cfg.subset, source);
  take(j, "clusters", cfg.clusters, source);
  take(j, "refit_draws", cfg.refit_draws, source);
  take(j, "intercept_prior_sd", cfg.intercept_prior_sd, source);
  take(j, "coefficient_prior_sd", cfg.coefficient_prior_sd, source);
  take(j, "train", cfg.train, source);
  take(j, "test", cfg.test, source);
  take(j, "draws", cfg.draws, source);
  take(j, "test_probs", cfg.test_probs, source);
  take(j, "out_dir", cfg.out_dir, source);
  take(j, "draws_dir", cfg.draws_dir, source);
  take(j, "refit_cmd", cfg.refit_cmd, source);
  take(j, "folds_file", cfg.folds_file, source);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text(path), path.string());
}

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["family"] = std::string(to_string(cfg.family));
  j["link"] = std::string(to_string(cfg.link));
  j["search_clusters"] = cfg.search_clusters;
  j["eval_draws"] = cfg.eval_draws;
  j["max_size"] = cfg.max_size;
  j["folds"] = cfg.folds;
  j["seed"] = cfg.seed;
  j["method"] = cfg.method;
  j["multiplier"] = cfg.multiplier;
  j["response"] = cfg.data.response;
  j["categories"] = cfg.data.categories;
  j["category_count"] = cfg.data.category_count;
  j["predictors"] = cfg.data.predictors;
  j["draws_kind"] = cfg.draws_kind;
  j["subset"] = cfg.subset;
  j["clusters"] = cfg.clusters;
  j["refit_draws"] = cfg.refit_draws;
  j["intercept_prior_sd"] = cfg.intercept_prior_sd;
  j["coefficient_prior_sd"] = cfg.coefficient_prior_sd;
  j["train"] = cfg.train;
  j["test"] = cfg.test;
  j["draws"] = cfg.draws;
  j["test_probs"] = cfg.test_probs;
  j["out_dir"] = cfg.out_dir;
  j["draws_dir"] = cfg.draws_dir;
  j["refit_cmd"] = cfg.refit_cmd;
  j["folds_file"] = cfg.folds_file;
  return j.dump(2);
}

SimConfig parse_sim_config(const std::string& json_text, const std::string& source) {
  const json j = parse_json_object(json_text, source);
  reject_unknown(j,
                 {"observations", "predictors", "categories", "p0", "iterations", "link", "seed",
                  "slab_df", "slab_scale", "tau_fixed", "reference_draws", "threshold_prior_sd",
                  "coefficient_prior_scale", "search_clusters", "eval_draws", "max_size",
                  "multiplier"},
                 source);
  SimConfig cfg;
  take(j, "observations", cfg.observations, source);
  take(j, "predictors", cfg.predictors, source);
  take(j, "categories", cfg.categories, source);
  take(j, "p0", cfg.p0, source);
  take(j, "iterations", cfg.iterations, source);
  take_enum(j, "link", [&](const std::string& s) { cfg.link = parse_link(s); }, source);
  take(j, "seed", cfg.seed, source);
  take(j, "slab_df", cfg.horseshoe.slab_df, source);
  take(j, "slab_scale", cfg.horseshoe.slab_scale, source);
  take(j, "tau_fixed", cfg.horseshoe.tau_fixed, source);
  take(j, "reference_draws", cfg.reference_draws, source);
  take(j, "threshold_prior_sd", cfg.threshold_prior_sd, source);
  take(j, "coefficient_prior_scale", cfg.coefficient_prior_scale, source);
  take(j, "search_clusters", cfg.search_clusters, source);
  take(j, "eval_draws", cfg.eval_draws, source);
  take(j, "max_size", cfg.max_size, source);
  take(j, "multiplier", cfg.multiplier, source);
  try {
    cfg.validate();
  } catch (const InvalidParameter& e) {
    throw DataError(source + ": " + e.what());
  }
  return cfg;
}

SimConfig load_sim_config(const std::filesystem::path& path) {
  return parse_sim_config(read_text(path), path.string());
}

std::string sim_config_json(const SimConfig& cfg) {
  json j;
  j["observations"] = cfg.observations;
  j["predictors"] = cfg.predictors;
  j["categories"] = cfg.categories;
  j["p0"] = cfg.p0;
  j["iterations"] = cfg.iterations;
  j["link"] = std::string(to_string(cfg.link));
  j["seed"] = cfg.seed;
  j["slab_df"] = cfg.horseshoe.slab_df;
  j["slab_scale"] = cfg.horseshoe.slab_scale;
  j["tau_fixed"] = cfg.horseshoe.tau_fixed;
  j["reference_draws"] = cfg.reference_draws;
  j["threshold_prior_sd"] = cfg.threshold_prior_sd;
  j["coefficient_prior_scale"] = cfg.coefficient_prior_scale;
  j["search_clusters"] = cfg.search_clusters;
  j["eval_draws"] = cfg.eval_draws;
  j["max_size"] = cfg.max_size;
  j["multiplier"] = cfg.multiplier;
  return j.dump(2);
}

// --------------------------------------------------------------- metadata

std::uint64_t file_checksum(const std::filesystem::path& path) { return fnv1a(read_text(path)); }

std::string metadata_json(const RunMetadata& meta) {
  json j;
  j["tool"] = "projsel";
  j["version"] = PROJSEL_VERSION;
  j["command"] = meta.command;
  j["config"] = meta.config_json.empty() ? json::object() : json::parse(meta.config_json);
  j["seeds"] = json::object();
  for (const auto& [name, seed] : meta.seeds) j["seeds"][name] = seed;
  j["inputs"] = json::array();
  for (const auto& path : meta.inputs)
    j["inputs"].push_back({{"path", path.string()}, {"fnv1a64", hex64(file_checksum(path))}});
  j["notes"] = json::object();
  for (const auto& [k, v] : meta.notes) j["notes"][k] = v;
  j["warnings"] = meta.warnings;
  return j.dump(2) + "\n";
}

}  // namespace projsel
