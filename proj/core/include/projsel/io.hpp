#pragma once

// File formats: datasets, reference draws, statistics tables, solution
// paths, JSON configs and run metadata.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "projsel/csv.hpp"
#include "projsel/model_core.hpp"
#include "projsel/projection.hpp"
#include "projsel/reference.hpp"
#include "projsel/search_eval.hpp"
#include "projsel/simulation.hpp"

namespace projsel {

struct DatasetSpec {
  std::string response = "y";
  /// Ordered category labels. Empty: the response must hold integer codes
  /// 1..J, with J = `category_count` if positive, else the largest code seen.
  std::vector<std::string> categories;
  int category_count = 0;
  /// Predictor columns; empty means every column except the response.
  std::vector<std::string> predictors;
};

Dataset dataset_from_table(const Table& table, const DatasetSpec& spec, const std::string& source);
Dataset load_dataset(const std::filesystem::path& path, const DatasetSpec& spec = {});
/// Predictors then the response (as its label).
Table dataset_table(const Dataset& data, const std::string& response = "y");
void save_dataset(const std::filesystem::path& path, const Dataset& data,
                  const std::string& response = "y");

DrawSet draws_from_table(const Table& table, DrawKind kind, const std::string& source);
DrawSet load_draws(const std::filesystem::path& path, DrawKind kind);
Table draws_table(const DrawSet& draws);
void save_draws(const std::filesystem::path& path, const DrawSet& draws);

struct StatsFile {
  std::vector<SizeStats> sizes;
  double ref_mlpd = 0.0;
  double ref_gmpd = 0.0;
};

Table stats_table(const PerfStats& stats);
void save_stats(const std::filesystem::path& path, const PerfStats& stats);
StatsFile stats_from_table(const Table& table, const std::string& source);
StatsFile load_stats(const std::filesystem::path& path);

/// size, predictor, column_index (1-based position in the dataset).
Table path_table(const SolutionPath& path);
Table agreement_table(const AgreementTable& table);
/// Per-observation fold ids (1-based) in a single column "fold".
std::vector<int> load_folds(const std::filesystem::path& path, int observations);

/// Per-cluster parameters and KL as JSON text.
std::string projection_json(const ProjectedSubmodel& proj);

struct RunConfig {
  FamilyKind family = FamilyKind::cumulative;
  LinkKind link = LinkKind::probit;
  int search_clusters = 20;
  int eval_draws = 400;
  int max_size = -1;
  int folds = 5;
  std::uint64_t seed = 1;
  std::string method = "augmented";  // augmented, latent or both
  double multiplier = 1.0;
  DatasetSpec data{};
  std::string draws_kind = "cumulative-params";
  std::vector<std::string> subset;   // for `project`
  int clusters = 20;                 // for `project`
  // Internal refit for cv-varsel.
  int refit_draws = 1000;
  double intercept_prior_sd = 2.5;
  double coefficient_prior_sd = 1.0;
  // Paths.
  std::string train, test, draws, test_probs, out_dir, draws_dir, refit_cmd, folds_file;
};

/// Strict: unknown keys and wrong types are DataErrors.
RunConfig parse_run_config(const std::string& json_text, const std::string& source);
RunConfig load_run_config(const std::filesystem::path& path);
std::string run_config_json(const RunConfig& cfg);

SimConfig parse_sim_config(const std::string& json_text, const std::string& source);
SimConfig load_sim_config(const std::filesystem::path& path);
std::string sim_config_json(const SimConfig& cfg);

struct RunMetadata {
  std::string command;
  std::string config_json;                       // echo of the effective config
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::filesystem::path> inputs;     // checksummed
  std::map<std::string, std::string> notes;
  std::vector<std::string> warnings;
};

std::string metadata_json(const RunMetadata& meta);
std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace projsel
