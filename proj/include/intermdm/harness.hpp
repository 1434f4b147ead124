// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "intermdm/crossmodal.hpp"
#include "intermdm/inference.hpp"
#include "intermdm/metrics.hpp"
#include "intermdm/synthdata.hpp"

namespace intermdm {

// Seed-derivation tags shared by everything that derives streams from a
// base seed; changing one changes every stream it feeds.
namespace seedtag {
inline constexpr std::uint64_t data = 0x64617461;  // trial datasets
inline constexpr std::uint64_t game = 0x67616d65;  // game runs
inline constexpr std::uint64_t eval = 0x65766100;  // cross-modal sampling
}  // namespace seedtag

/// Stable index for a pattern name: "-" -> 0, "I" -> 1, "II" -> 2,
/// "III" -> 3. Used in seed derivation.
std::uint32_t pattern_index(const std::string& pattern);

/// Where the observations come from: the synthetic generator (one dataset
/// per trial) or a histogram file (shared across trials).
struct DataSource {
  bool from_file = false;
  std::string path;
  SyntheticSpec synthetic;
};

/// Model hyperparameters as given in a config file. Bin counts, the datum
/// count and the per-modality beta vector are resolved against the dataset
/// when a run starts.
struct ModelParams {
  std::uint32_t num_signs = 15;       // K
  std::uint32_t num_categories = 15;  // L
  double alpha = 0.01;
  double beta_default = 0.001;
  std::map<std::string, double> beta_overrides;  // keyed by modality name
  Simplex gamma;  // empty = uniform
  std::uint32_t iterations = 200;

  ModelConfig resolve(const Dataset& dataset, CommunicationType comm,
                      std::uint64_t seed) const;
};

/// Fully resolved experiment description: the grid
/// (condition, pattern) x communication type x trials.
struct ExperimentSpec {
  ModelParams model;
  DataSource data;
  std::vector<std::pair<int, std::string>> conditions = {{1, "-"}};
  std::vector<CommunicationType> comm_types = {
      CommunicationType::Proposed, CommunicationType::AllAccept,
      CommunicationType::AllReject, CommunicationType::IntegratedGibbs};
  std::uint32_t trials = 10;
  std::uint64_t base_seed = 0;
  std::uint32_t parallel = 1;

  void validate() const;
};

struct TrialOutcome {
  std::uint32_t trial = 0;
  std::uint64_t seed = 0;
  double ari_a = 0.0;
  double ari_b = 0.0;
  double ari_w = 0.0;    // on the A-side sign copy
  double ari_w_b = 0.0;  // diagnostic: on the B-side copy
  double kappa = 0.0;    // NaN for the integrated sampler
  double ari_a_max_last50 = 0.0;  // diagnostic over the trailing window
  double ari_b_max_last50 = 0.0;
  std::vector<IterationRecord> trace;
};

struct CellStats {
  double mean = 0.0;
  double sd = 0.0;
  // Welch test against the proposed cell of the same (condition, pattern);
  // unset for the proposed row itself or when trials < 2.
  std::optional<TTestResult> vs_proposed;
};

struct CellResult {
  int condition = 1;
  std::string pattern = "-";
  CommunicationType comm = CommunicationType::Proposed;
  std::vector<TrialOutcome> trials;
  CellStats ari_a;
  CellStats ari_b;
  double kappa_mean = 0.0;  // NaN for the integrated sampler
  double ari_w_mean = 0.0;
  double ari_w_b_mean = 0.0;
};

struct ExperimentResults {
  ExperimentSpec spec;
  std::vector<CellResult> cells;
};

inline constexpr const char* kResultsCsvHeader =
    "condition,pattern,comm_type,ari_a_mean,ari_a_sd,ari_a_p,ari_b_mean,"
    "ari_b_sd,ari_b_p,kappa_mean,ari_w_mean";

/// Parse the experiment config schema (optionally starting from a named
/// preset). Also accepts a results bundle, in which case its embedded
/// config is replayed.
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
ExperimentSpec load_experiment_spec(const std::string& path);
nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);

/// Run the full grid. Trials may run on parallel workers; results are
/// deterministic for a fixed base seed regardless of scheduling. A failed
/// trial aborts the whole cell with a diagnostic naming it. A non-null
/// shared_dataset overrides the spec's data source for every trial.
ExperimentResults run_experiment(const ExperimentSpec& spec,
                                 const Dataset* shared_dataset = nullptr);

std::string results_to_csv(const ExperimentResults& results);
nlohmann::json results_to_json(const ExperimentResults& results);
std::string results_traces_to_csv(const ExperimentResults& results);
std::string results_traces_to_jsonl(const ExperimentResults& results);

/// Write results.csv / results.json / traces.* into a directory.
/// format: "csv", "json" or "all".
void write_results(const ExperimentResults& results, const std::string& out_dir,
                   const std::string& format);

/// Human-readable summary of a results bundle (for the inspect command).
std::string summarize_results_json(const nlohmann::json& bundle);

// ---- cross-modal evaluation -------------------------------------------

struct CrossmodalSpec {
  ModelParams model;
  DataSource data;
  std::vector<CommunicationType> comm_types = {CommunicationType::Proposed,
                                               CommunicationType::AllAccept,
                                               CommunicationType::AllReject};
  int condition = 1;
  std::string pattern = "-";
  CategoryPrior category_prior = CategoryPrior::SignMarginalized;
  std::uint64_t base_seed = 0;
};

struct CrossmodalDatum {
  std::uint32_t d = 0;
  std::uint32_t sign = 0;
  Observation predicted;
  // Entries align with the report's modality list; NaN / unset where a
  // modality cannot be compared.
  std::vector<double> cosine;
  std::vector<double> jsd;
  std::vector<std::optional<std::size_t>> nearest;
};

struct CrossmodalRow {
  CommunicationType comm = CommunicationType::Proposed;
  std::vector<double> mean_cosine;  // per modality
  std::vector<double> mean_jsd;
  std::vector<CrossmodalDatum> details;
};

struct CrossmodalReport {
  std::vector<std::string> modalities;
  nlohmann::json config_echo;
  std::vector<CrossmodalRow> rows;
};

CrossmodalSpec crossmodal_spec_from_json(const nlohmann::json& j);

/// Train each requested communication type, then for every datum let agent
/// A utter a sign for its observation and agent B imagine the matching
/// observation; scores compare the imagined histograms against agent A's.
/// A non-null shared_dataset overrides the spec's data source.
CrossmodalReport run_crossmodal_eval(const CrossmodalSpec& spec,
                                     const Dataset* shared_dataset = nullptr);

/// Evaluate one already-trained state (single row).
CrossmodalRow evaluate_crossmodal_state(const GameState& state,
                                        const ModelConfig& config,
                                        const Dataset& dataset,
                                        CategoryPrior prior, Rng& rng);

std::string crossmodal_table_csv(const CrossmodalReport& report);
std::string crossmodal_details_jsonl(const CrossmodalReport& report);
void write_crossmodal_report(const CrossmodalReport& report,
                             const std::string& out_dir);

}  // namespace intermdm
