// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "intermdm/error.hpp"
#include "intermdm/serialize.hpp"

namespace intermdm {

std::uint32_t pattern_index(const std::string& pattern) {
  if (pattern == "-") return 0;
  if (pattern == "I") return 1;
  if (pattern == "II") return 2;
  if (pattern == "III") return 3;
  throw_config("pattern must be one of -, I, II, III");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

std::string format_p(double p) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", p);
  return buf;
}

}  // namespace

ModelConfig ModelParams::resolve(const Dataset& dataset,
                                 CommunicationType comm,
                                 std::uint64_t seed) const {
  if (iterations < 1) throw_config("iterations must be >= 1");
  ModelConfig config;
  config.num_signs = num_signs;
  config.num_categories = num_categories;
  config.num_data = dataset.size();
  config.modalities = dataset.modalities;
  config.bins = dataset.bins;
  config.alpha = alpha;
  config.beta.clear();
  for (const std::string& name : dataset.modalities) {
    auto it = beta_overrides.find(name);
    config.beta.push_back(it == beta_overrides.end() ? beta_default
                                                     : it->second);
  }
  config.gamma = gamma;
  config.iterations = iterations;
  config.communication = comm;
  config.seed = seed;
  config.validate();
  return config;
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw_config("trials must be >= 1");
  if (parallel < 1) throw_config("parallel must be >= 1");
  if (conditions.empty()) throw_config("at least one condition required");
  if (comm_types.empty())
    throw_config("at least one communication type required");
  for (const auto& [condition, pattern] : conditions) {
    if (condition < 1 || condition > 4)
      throw_config("condition must be 1..4");
    pattern_index(pattern);
    if (condition == 1 && pattern != "-")
      throw_config("condition 1 takes pattern '-'");
    if (condition != 1 && pattern == "-")
      throw_config("conditions 2-4 need pattern I, II or III");
  }
  if (data.from_file && data.path.empty())
    throw_config("data.source=file requires data.path");
}

// ---- config schema ------------------------------------------------------

namespace {

void apply_preset(const std::string& name, ExperimentSpec& spec) {
  if (name == "synthetic-default") return;  // the built-in defaults
  if (name == "real-style") {
    // Desk-scale stand-in for externally quantized histogram datasets:
    // K = L = 40, 300 iterations, histograms loaded from file.
    spec.model.num_signs = 40;
    spec.model.num_categories = 40;
    spec.model.iterations = 300;
    spec.data.synthetic.num_objects = 40;
    spec.data.synthetic.bins = {15, 15, 15};
    return;
  }
  throw_config("unknown preset '" + name +
               "' (expected synthetic-default or real-style)");
}

void parse_model_section(const nlohmann::json& j, ModelParams& model) {
  if (j.contains("K")) model.num_signs = j.at("K").get<std::uint32_t>();
  if (j.contains("L")) model.num_categories = j.at("L").get<std::uint32_t>();
  if (j.contains("alpha")) model.alpha = j.at("alpha").get<double>();
  if (j.contains("iterations"))
    model.iterations = j.at("iterations").get<std::uint32_t>();
  if (j.contains("beta")) {
    const auto& beta = j.at("beta");
    if (beta.is_number()) {
      model.beta_default = beta.get<double>();
    } else if (beta.is_object()) {
      for (auto it = beta.begin(); it != beta.end(); ++it)
        model.beta_overrides[it.key()] = it.value().get<double>();
    } else {
      throw_config("model.beta must be a number or an object per modality");
    }
  }
  if (j.contains("gamma") && j.at("gamma").is_array())
    model.gamma = j.at("gamma").get<Simplex>();
}

void parse_data_section(const nlohmann::json& j, DataSource& data) {
  const std::string source = j.value("source", "synthetic");
  if (source == "file") {
    data.from_file = true;
    data.path = j.value("path", "");
    return;
  }
  if (source != "synthetic")
    throw_config("data.source must be 'synthetic' or 'file'");
  data.from_file = false;
  SyntheticSpec& syn = data.synthetic;
  if (j.contains("modalities"))
    syn.modalities = j.at("modalities").get<std::vector<std::string>>();
  auto per_modality_u32 = [&](const char* key,
                              std::vector<std::uint32_t>& out) {
    if (!j.contains(key)) {
      out.resize(syn.modalities.size(), out.empty() ? 20 : out.front());
      return;
    }
    const auto& e = j.at(key);
    if (e.is_number_integer()) {
      out.assign(syn.modalities.size(), e.get<std::uint32_t>());
    } else if (e.is_object()) {
      out.resize(syn.modalities.size());
      for (std::size_t m = 0; m < syn.modalities.size(); ++m) {
        if (!e.contains(syn.modalities[m]))
          throw_config(std::string("data.") + key + ": missing modality '" +
                       syn.modalities[m] + "'");
        out[m] = e.at(syn.modalities[m]).get<std::uint32_t>();
      }
    } else {
      throw_config(std::string("data.") + key +
                   " must be an integer or an object per modality");
    }
  };
  if (syn.bins.size() != syn.modalities.size())
    syn.bins.assign(syn.modalities.size(), 20);
  if (syn.totals.size() != syn.modalities.size())
    syn.totals.assign(syn.modalities.size(), 100);
  per_modality_u32("bins", syn.bins);
  per_modality_u32("total", syn.totals);
  if (j.contains("num_objects"))
    syn.num_objects = j.at("num_objects").get<std::uint32_t>();
  if (j.contains("per_object"))
    syn.per_object = j.at("per_object").get<std::uint32_t>();
  if (j.contains("groups_per_modality"))
    syn.groups_per_modality = j.at("groups_per_modality").get<std::uint32_t>();
  if (j.contains("base_concentration"))
    syn.base_concentration = j.at("base_concentration").get<double>();
  if (j.contains("signature_concentration"))
    syn.signature_concentration =
        j.at("signature_concentration").get<double>();
  if (j.contains("signature_weight"))
    syn.signature_weight = j.at("signature_weight").get<double>();
  if (j.contains("within_group_weight"))
    syn.within_group_weight = j.at("within_group_weight").get<double>();
  if (j.contains("min_signature_jsd"))
    syn.min_signature_jsd = j.at("min_signature_jsd").get<double>();
  syn.validate();
}

std::vector<std::pair<int, std::string>> parse_conditions(
    const nlohmann::json& j) {
  std::vector<std::pair<int, std::string>> out;
  if (!j.is_array() || j.empty())
    throw_config("experiment.conditions must be a non-empty array");
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("condition"))
      throw_config("each condition needs a 'condition' field");
    const int condition = e.at("condition").get<int>();
    std::string pattern = e.value("pattern", condition == 1 ? "-" : "");
    if (pattern.empty())
      throw_config("conditions 2-4 need a 'pattern' field");
    out.emplace_back(condition, pattern);
  }
  return out;
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw_config("config must be a JSON object");
  if (j.value("schema", "") == std::string("intermdm-results-v1"))
    return experiment_spec_from_json(j.at("config"));

  ExperimentSpec spec;
  apply_preset(j.value("preset", "synthetic-default"), spec);
  if (j.contains("model")) parse_model_section(j.at("model"), spec.model);
  if (j.contains("data")) parse_data_section(j.at("data"), spec.data);
  if (j.contains("experiment")) {
    const auto& e = j.at("experiment");
    if (e.contains("trials")) spec.trials = e.at("trials").get<std::uint32_t>();
    if (e.contains("seed")) spec.base_seed = e.at("seed").get<std::uint64_t>();
    if (e.contains("parallel"))
      spec.parallel = e.at("parallel").get<std::uint32_t>();
    if (e.contains("conditions"))
      spec.conditions = parse_conditions(e.at("conditions"));
    if (e.contains("communication_types")) {
      spec.comm_types.clear();
      for (const auto& name : e.at("communication_types"))
        spec.comm_types.push_back(
            communication_type_from_string(name.get<std::string>()));
      if (spec.comm_types.empty())
        throw_config("experiment.communication_types must be non-empty");
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_config("config '" + path + "': " + e.what());
  }
  return experiment_spec_from_json(j);
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json model{
      {"K", spec.model.num_signs},
      {"L", spec.model.num_categories},
      {"alpha", spec.model.alpha},
      {"iterations", spec.model.iterations},
  };
  if (spec.model.beta_overrides.empty()) {
    model["beta"] = spec.model.beta_default;
  } else {
    nlohmann::json beta = nlohmann::json::object();
    for (const auto& [name, value] : spec.model.beta_overrides)
      beta[name] = value;
    beta["default"] = spec.model.beta_default;
    model["beta"] = beta;
  }
  if (!spec.model.gamma.empty()) model["gamma"] = spec.model.gamma;

  nlohmann::json data;
  if (spec.data.from_file) {
    data = {{"source", "file"}, {"path", spec.data.path}};
  } else {
    const SyntheticSpec& syn = spec.data.synthetic;
    nlohmann::json bins = nlohmann::json::object();
    nlohmann::json totals = nlohmann::json::object();
    for (std::size_t m = 0; m < syn.modalities.size(); ++m) {
      bins[syn.modalities[m]] = syn.bins[m];
      totals[syn.modalities[m]] = syn.totals[m];
    }
    data = {{"source", "synthetic"},
            {"modalities", syn.modalities},
            {"num_objects", syn.num_objects},
            {"per_object", syn.per_object},
            {"bins", bins},
            {"total", totals},
            {"groups_per_modality", syn.groups_per_modality},
            {"base_concentration", syn.base_concentration},
            {"signature_concentration", syn.signature_concentration},
            {"signature_weight", syn.signature_weight},
            {"within_group_weight", syn.within_group_weight},
            {"min_signature_jsd", syn.min_signature_jsd}};
  }

  nlohmann::json conditions = nlohmann::json::array();
  for (const auto& [condition, pattern] : spec.conditions)
    conditions.push_back({{"condition", condition}, {"pattern", pattern}});
  nlohmann::json comm = nlohmann::json::array();
  for (CommunicationType type : spec.comm_types)
    comm.push_back(to_string(type));

  return nlohmann::json{
      {"model", model},
      {"data", data},
      {"experiment",
       {{"trials", spec.trials},
        {"seed", spec.base_seed},
        {"parallel", spec.parallel},
        {"conditions", conditions},
        {"communication_types", comm}}},
  };
}

// ---- experiment execution ----------------------------------------------

namespace {

TrialOutcome run_trial(const ExperimentSpec& spec, const Dataset& base_dataset,
                       int condition, const std::string& pattern,
                       CommunicationType comm, std::uint32_t trial) {
  const ConditionSpec cond = ConditionSpec::make(
      condition, pattern, base_dataset.modalities.size());
  const Dataset masked = apply_condition(base_dataset, cond);
  const std::uint64_t game_seed = derive_seed(
      spec.base_seed,
      {seedtag::game, trial, static_cast<std::uint64_t>(condition),
       pattern_index(pattern), static_cast<std::uint64_t>(comm)});
  const ModelConfig config = spec.model.resolve(masked, comm, game_seed);
  const RunResult run = run_model(config, masked);

  TrialOutcome outcome;
  outcome.trial = trial;
  outcome.seed = game_seed;
  const IterationRecord& last = run.trace.back();
  outcome.ari_a = last.ari_a;
  outcome.ari_b = last.ari_b;
  outcome.ari_w = last.ari_w;
  outcome.ari_w_b = ari(run.state.signs_b, masked.true_labels);
  outcome.kappa = last.kappa;
  const std::size_t window = std::min<std::size_t>(50, run.trace.size());
  double max_a = -1.0;
  double max_b = -1.0;
  for (std::size_t i = run.trace.size() - window; i < run.trace.size(); ++i) {
    max_a = std::max(max_a, run.trace[i].ari_a);
    max_b = std::max(max_b, run.trace[i].ari_b);
  }
  outcome.ari_a_max_last50 = max_a;
  outcome.ari_b_max_last50 = max_b;
  outcome.trace = std::move(run.trace);
  return outcome;
}

}  // namespace

ExperimentResults run_experiment(const ExperimentSpec& spec,
                                 const Dataset* shared_dataset) {
  spec.validate();

  // Trial datasets are pregenerated sequentially so results do not depend
  // on worker scheduling. A file-backed or caller-supplied source is shared
  // by every trial.
  std::vector<Dataset> trial_datasets;
  bool shared = true;
  if (shared_dataset != nullptr) {
    trial_datasets.push_back(*shared_dataset);
  } else if (spec.data.from_file) {
    trial_datasets.push_back(load_histogram_dataset(spec.data.path));
  } else {
    shared = false;
    trial_datasets.reserve(spec.trials);
    for (std::uint32_t t = 0; t < spec.trials; ++t) {
      Rng rng(derive_seed(spec.base_seed, {seedtag::data, t}));
      trial_datasets.push_back(generate_synthetic(spec.data.synthetic, rng));
    }
  }
  auto dataset_for_trial = [&](std::uint32_t t) -> const Dataset& {
    return shared ? trial_datasets.front() : trial_datasets[t];
  };

  ExperimentResults results;
  results.spec = spec;
  for (const auto& [condition, pattern] : spec.conditions) {
    for (CommunicationType comm : spec.comm_types) {
      CellResult cell;
      cell.condition = condition;
      cell.pattern = pattern;
      cell.comm = comm;
      cell.trials.resize(spec.trials);
      results.cells.push_back(std::move(cell));
    }
  }

  struct Task {
    std::size_t cell = 0;
    std::uint32_t trial = 0;
  };
  std::vector<Task> tasks;
  tasks.reserve(results.cells.size() * spec.trials);
  for (std::size_t c = 0; c < results.cells.size(); ++c)
    for (std::uint32_t t = 0; t < spec.trials; ++t)
      tasks.push_back({c, t});

  std::vector<std::string> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      CellResult& cell = results.cells[task.cell];
      try {
        cell.trials[task.trial] =
            run_trial(spec, dataset_for_trial(task.trial), cell.condition,
                      cell.pattern, cell.comm, task.trial);
      } catch (const std::exception& e) {
        failures[i] = "cell (condition " + std::to_string(cell.condition) +
                      ", pattern " + cell.pattern + ", " +
                      to_string(cell.comm) + ") trial " +
                      std::to_string(task.trial) + ": " + e.what();
      }
    }
  };

  const std::uint32_t workers =
      std::min<std::uint32_t>(spec.parallel,
                              static_cast<std::uint32_t>(tasks.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::string& failure : failures)
    if (!failure.empty()) throw_runtime("experiment aborted: " + failure);

  // Aggregates, then Welch tests against the proposed cell of each group.
  for (CellResult& cell : results.cells) {
    std::vector<double> a;
    std::vector<double> b;
    std::vector<double> w;
    std::vector<double> wb;
    std::vector<double> kp;
    for (const TrialOutcome& t : cell.trials) {
      a.push_back(t.ari_a);
      b.push_back(t.ari_b);
      w.push_back(t.ari_w);
      wb.push_back(t.ari_w_b);
      kp.push_back(t.kappa);
    }
    cell.ari_a.mean = mean_of(a);
    cell.ari_a.sd = sd_of(a, cell.ari_a.mean);
    cell.ari_b.mean = mean_of(b);
    cell.ari_b.sd = sd_of(b, cell.ari_b.mean);
    cell.ari_w_mean = mean_of(w);
    cell.ari_w_b_mean = mean_of(wb);
    cell.kappa_mean =
        cell.comm == CommunicationType::IntegratedGibbs ? kNaN : mean_of(kp);
  }

  for (CellResult& cell : results.cells) {
    if (cell.comm == CommunicationType::Proposed || spec.trials < 2) continue;
    const CellResult* proposed = nullptr;
    for (const CellResult& other : results.cells) {
      if (other.condition == cell.condition && other.pattern == cell.pattern &&
          other.comm == CommunicationType::Proposed) {
        proposed = &other;
        break;
      }
    }
    if (proposed == nullptr) continue;
    auto collect = [](const CellResult& c, bool agent_a) {
      std::vector<double> xs;
      for (const TrialOutcome& t : c.trials)
        xs.push_back(agent_a ? t.ari_a : t.ari_b);
      return xs;
    };
    cell.ari_a.vs_proposed =
        welch_t_test(collect(*proposed, true), collect(cell, true));
    cell.ari_b.vs_proposed =
        welch_t_test(collect(*proposed, false), collect(cell, false));
  }
  return results;
}

// ---- output -------------------------------------------------------------

namespace {

std::string p_column(const CellResult& cell, const CellStats& stats,
                     std::uint32_t trials) {
  if (cell.comm == CommunicationType::Proposed) return "-";
  if (trials < 2) return "n/a";
  if (!stats.vs_proposed.has_value()) return "-";
  return format_p(stats.vs_proposed->p);
}

}  // namespace

std::string results_to_csv(const ExperimentResults& results) {
  std::string out = kResultsCsvHeader;
  out += "\n";
  for (const CellResult& cell : results.cells) {
    out += std::to_string(cell.condition);
    out += ",";
    out += cell.pattern;
    out += ",";
    out += to_string(cell.comm);
    out += ",";
    out += format_double(cell.ari_a.mean, 4);
    out += ",";
    out += format_double(cell.ari_a.sd, 4);
    out += ",";
    out += p_column(cell, cell.ari_a, results.spec.trials);
    out += ",";
    out += format_double(cell.ari_b.mean, 4);
    out += ",";
    out += format_double(cell.ari_b.sd, 4);
    out += ",";
    out += p_column(cell, cell.ari_b, results.spec.trials);
    out += ",";
    out += std::isnan(cell.kappa_mean) ? std::string("-")
                                       : format_double(cell.kappa_mean, 4);
    out += ",";
    out += format_double(cell.ari_w_mean, 4);
    out += "\n";
  }
  return out;
}

namespace {

nlohmann::json stats_to_json(const CellStats& stats, int trials,
                             bool is_proposed) {
  nlohmann::json j{{"mean", stats.mean}, {"sd", stats.sd}};
  if (is_proposed || trials < 2) {
    j["p_vs_proposed"] = nullptr;
  } else if (stats.vs_proposed.has_value()) {
    j["p_vs_proposed"] = stats.vs_proposed->p;
    j["t_vs_proposed"] = stats.vs_proposed->t;
    j["significance"] = to_string(stats.vs_proposed->band);
  } else {
    j["p_vs_proposed"] = nullptr;
  }
  return j;
}

nlohmann::json trace_tuples(const std::vector<IterationRecord>& trace) {
  nlohmann::json arr = nlohmann::json::array();
  auto field = [](double v) {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  for (const IterationRecord& r : trace)
    arr.push_back({r.iteration, field(r.ari_a), field(r.ari_b),
                   field(r.ari_w), field(r.kappa), field(r.accept_rate_ab),
                   field(r.accept_rate_ba)});
  return arr;
}

}  // namespace

nlohmann::json results_to_json(const ExperimentResults& results) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult& cell : results.cells) {
    const bool proposed = cell.comm == CommunicationType::Proposed;
    nlohmann::json trials = nlohmann::json::array();
    for (const TrialOutcome& t : cell.trials) {
      trials.push_back({
          {"trial", t.trial},
          {"seed", t.seed},
          {"ari_a", t.ari_a},
          {"ari_b", t.ari_b},
          {"ari_w", t.ari_w},
          {"ari_w_b", t.ari_w_b},
          {"kappa", std::isnan(t.kappa) ? nlohmann::json(nullptr)
                                        : nlohmann::json(t.kappa)},
          {"ari_a_max_last50", t.ari_a_max_last50},
          {"ari_b_max_last50", t.ari_b_max_last50},
          {"trace", trace_tuples(t.trace)},
      });
    }
    nlohmann::json kappa;
    if (std::isnan(cell.kappa_mean)) {
      kappa = nullptr;
    } else {
      kappa = {{"mean", cell.kappa_mean},
               {"band", to_string(kappa_band(cell.kappa_mean))}};
    }
    cells.push_back({
        {"condition", cell.condition},
        {"pattern", cell.pattern},
        {"comm_type", to_string(cell.comm)},
        {"ari_a", stats_to_json(cell.ari_a, results.spec.trials, proposed)},
        {"ari_b", stats_to_json(cell.ari_b, results.spec.trials, proposed)},
        {"kappa", kappa},
        {"ari_w", {{"mean", cell.ari_w_mean}, {"mean_b", cell.ari_w_b_mean}}},
        {"trials", trials},
    });
  }
  return nlohmann::json{
      {"schema", "intermdm-results-v1"},
      {"config", experiment_spec_to_json(results.spec)},
      {"trace_fields",
       {"iteration", "ari_a", "ari_b", "ari_w", "kappa", "accept_rate_ab",
        "accept_rate_ba"}},
      {"cells", cells},
  };
}

namespace {

constexpr const char* kTracesCsvHeader =
    "condition,pattern,comm_type,trial,iteration,ari_a,ari_b,ari_w,kappa,"
    "accept_rate_ab,accept_rate_ba";

std::string csv_metric(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace

std::string results_traces_to_csv(const ExperimentResults& results) {
  std::string out = kTracesCsvHeader;
  out += "\n";
  for (const CellResult& cell : results.cells) {
    const std::string prefix = std::to_string(cell.condition) + "," +
                               cell.pattern + "," + to_string(cell.comm) + ",";
    for (const TrialOutcome& t : cell.trials) {
      for (const IterationRecord& r : t.trace) {
        out += prefix;
        out += std::to_string(t.trial);
        out += ",";
        out += std::to_string(r.iteration);
        out += ",";
        out += csv_metric(r.ari_a);
        out += ",";
        out += csv_metric(r.ari_b);
        out += ",";
        out += csv_metric(r.ari_w);
        out += ",";
        out += csv_metric(r.kappa);
        out += ",";
        out += csv_metric(r.accept_rate_ab);
        out += ",";
        out += csv_metric(r.accept_rate_ba);
        out += "\n";
      }
    }
  }
  return out;
}

std::string results_traces_to_jsonl(const ExperimentResults& results) {
  std::string out;
  auto field = [](double v) {
    return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
  };
  for (const CellResult& cell : results.cells) {
    for (const TrialOutcome& t : cell.trials) {
      for (const IterationRecord& r : t.trace) {
        nlohmann::json j{
            {"condition", cell.condition},
            {"pattern", cell.pattern},
            {"comm_type", to_string(cell.comm)},
            {"trial", t.trial},
            {"iteration", r.iteration},
            {"ari_a", field(r.ari_a)},
            {"ari_b", field(r.ari_b)},
            {"ari_w", field(r.ari_w)},
            {"kappa", field(r.kappa)},
            {"accept_rate_ab", field(r.accept_rate_ab)},
            {"accept_rate_ba", field(r.accept_rate_ba)},
        };
        out += j.dump();
        out += "\n";
      }
    }
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_runtime("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_results(const ExperimentResults& results, const std::string& out_dir,
                   const std::string& format) {
  if (format != "csv" && format != "json" && format != "all")
    throw_usage("format must be csv, json or all");
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "results.csv", results_to_csv(results));
  write_file(dir / "results.json", results_to_json(results).dump(2) + "\n");
  if (format == "csv" || format == "all")
    write_file(dir / "traces.csv", results_traces_to_csv(results));
  if (format == "json" || format == "all")
    write_file(dir / "traces.jsonl", results_traces_to_jsonl(results));
}

std::string summarize_results_json(const nlohmann::json& bundle) {
  if (bundle.value("schema", "") != std::string("intermdm-results-v1"))
    throw_config("not an intermdm results bundle");
  const auto& config = bundle.at("config");
  const auto& experiment = config.at("experiment");
  std::string out;
  out += "results bundle\n";
  out += "  K=" + config.at("model").at("K").dump() +
         " L=" + config.at("model").at("L").dump() +
         " iterations=" + config.at("model").at("iterations").dump() +
         " trials=" + experiment.at("trials").dump() +
         " seed=" + experiment.at("seed").dump() + "\n\n";
  char line[256];
  std::snprintf(line, sizeof(line), "  %-4s %-7s %-16s %-14s %-14s %-8s %-8s\n",
                "cond", "pattern", "comm_type", "ari_a", "ari_b", "kappa",
                "ari_w");
  out += line;
  for (const auto& cell : bundle.at("cells")) {
    const auto& a = cell.at("ari_a");
    const auto& b = cell.at("ari_b");
    auto mark = [](const nlohmann::json& stats) {
      if (stats.contains("significance"))
        return " " + stats.at("significance").get<std::string>();
      return std::string();
    };
    const std::string ari_a_text =
        format_double(a.at("mean").get<double>(), 2) + "+-" +
        format_double(a.at("sd").get<double>(), 2) + mark(a);
    const std::string ari_b_text =
        format_double(b.at("mean").get<double>(), 2) + "+-" +
        format_double(b.at("sd").get<double>(), 2) + mark(b);
    const std::string kappa_text =
        cell.at("kappa").is_null()
            ? std::string("-")
            : format_double(cell.at("kappa").at("mean").get<double>(), 2);
    std::snprintf(line, sizeof(line),
                  "  %-4d %-7s %-16s %-14s %-14s %-8s %-8s\n",
                  cell.at("condition").get<int>(),
                  cell.at("pattern").get<std::string>().c_str(),
                  cell.at("comm_type").get<std::string>().c_str(),
                  ari_a_text.c_str(), ari_b_text.c_str(), kappa_text.c_str(),
                  format_double(cell.at("ari_w").at("mean").get<double>(), 2)
                      .c_str());
    out += line;
  }
  return out;
}

// ---- cross-modal evaluation ----------------------------------------------

CrossmodalSpec crossmodal_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw_config("config must be a JSON object");
  CrossmodalSpec spec;
  ExperimentSpec base;  // reuse the shared sections
  apply_preset(j.value("preset", "synthetic-default"), base);
  if (j.contains("model")) parse_model_section(j.at("model"), base.model);
  if (j.contains("data")) parse_data_section(j.at("data"), base.data);
  spec.model = base.model;
  spec.data = base.data;
  if (j.contains("experiment") && j.at("experiment").contains("seed"))
    spec.base_seed = j.at("experiment").at("seed").get<std::uint64_t>();
  if (j.contains("crossmodal")) {
    const auto& c = j.at("crossmodal");
    if (c.contains("condition")) spec.condition = c.at("condition").get<int>();
    if (c.contains("pattern"))
      spec.pattern = c.at("pattern").get<std::string>();
    if (c.contains("communication_types")) {
      spec.comm_types.clear();
      for (const auto& name : c.at("communication_types"))
        spec.comm_types.push_back(
            communication_type_from_string(name.get<std::string>()));
    }
    if (c.contains("category_prior")) {
      const std::string prior = c.at("category_prior").get<std::string>();
      if (prior == "sign_marginalized")
        spec.category_prior = CategoryPrior::SignMarginalized;
      else if (prior == "uniform")
        spec.category_prior = CategoryPrior::Uniform;
      else
        throw_config("crossmodal.category_prior must be sign_marginalized "
                     "or uniform");
    }
    if (c.contains("seed"))
      spec.base_seed = c.at("seed").get<std::uint64_t>();
  }
  if (spec.comm_types.empty())
    throw_config("crossmodal needs at least one communication type");
  return spec;
}

CrossmodalRow evaluate_crossmodal_state(const GameState& state,
                                        const ModelConfig& config,
                                        const Dataset& dataset,
                                        CategoryPrior prior, Rng& rng) {
  const Simplex gamma = config.sign_prior();
  const std::size_t num_modalities = dataset.modalities.size();

  // Imagined histogram totals: agent A's per-datum total where available
  // (the comparison target), otherwise the mean total of B's observations.
  std::vector<std::uint32_t> fallback_totals(num_modalities, 0);
  for (ModalityId m = 0; m < num_modalities; ++m) {
    if (!dataset.observations_b.front().has(m)) continue;
    double acc = 0.0;
    for (const Observation& o : dataset.observations_b)
      acc += std::accumulate(o.at(m).begin(), o.at(m).end(), 0.0);
    fallback_totals[m] = static_cast<std::uint32_t>(std::max(
        1.0, std::round(acc / static_cast<double>(dataset.size()))));
  }

  CrossmodalRow row;
  row.comm = config.communication;
  std::vector<double> cos_acc(num_modalities, 0.0);
  std::vector<double> jsd_acc(num_modalities, 0.0);
  std::vector<std::size_t> counts(num_modalities, 0);

  for (std::uint32_t d = 0; d < dataset.size(); ++d) {
    const Observation& oa = dataset.observations_a[d];
    const SignInference inferred =
        infer_sign_from_observation(state.agent_a, oa, gamma, prior, rng);

    std::vector<std::uint32_t> totals(num_modalities, 1);
    for (ModalityId m = 0; m < num_modalities; ++m) {
      if (oa.has(m)) {
        const Histogram& h = oa.at(m);
        totals[m] = std::max<std::uint32_t>(
            1, std::accumulate(h.begin(), h.end(), std::uint32_t{0}));
      } else if (fallback_totals[m] > 0) {
        totals[m] = fallback_totals[m];
      }
    }

    CrossmodalDatum datum;
    datum.d = d;
    datum.sign = inferred.sign;
    datum.predicted = predict_observation_from_sign(state.agent_b,
                                                    inferred.sign, totals, rng);
    datum.cosine.assign(num_modalities, kNaN);
    datum.jsd.assign(num_modalities, kNaN);
    datum.nearest.assign(num_modalities, std::nullopt);

    for (ModalityId m = 0; m < num_modalities; ++m) {
      if (!datum.predicted.has(m)) continue;
      datum.nearest[m] =
          nearest_dataset_image(datum.predicted, dataset.observations_b, m);
      if (!oa.has(m)) continue;
      datum.cosine[m] = cosine_similarity(oa.at(m), datum.predicted.at(m));
      datum.jsd[m] = jsd_histograms(oa.at(m), datum.predicted.at(m));
      cos_acc[m] += datum.cosine[m];
      jsd_acc[m] += datum.jsd[m];
      counts[m] += 1;
    }
    row.details.push_back(std::move(datum));
  }

  row.mean_cosine.assign(num_modalities, kNaN);
  row.mean_jsd.assign(num_modalities, kNaN);
  for (ModalityId m = 0; m < num_modalities; ++m) {
    if (counts[m] == 0) continue;
    row.mean_cosine[m] = cos_acc[m] / static_cast<double>(counts[m]);
    row.mean_jsd[m] = jsd_acc[m] / static_cast<double>(counts[m]);
  }
  return row;
}

CrossmodalReport run_crossmodal_eval(const CrossmodalSpec& spec,
                                     const Dataset* shared_dataset) {
  Dataset dataset;
  if (shared_dataset != nullptr) {
    dataset = *shared_dataset;
  } else if (spec.data.from_file) {
    dataset = load_histogram_dataset(spec.data.path);
  } else {
    Rng rng(derive_seed(spec.base_seed, {seedtag::data, 0}));
    dataset = generate_synthetic(spec.data.synthetic, rng);
  }
  const ConditionSpec cond =
      ConditionSpec::make(spec.condition, spec.pattern,
                          dataset.modalities.size());
  const Dataset masked = apply_condition(dataset, cond);

  CrossmodalReport report;
  report.modalities = masked.modalities;

  for (std::size_t i = 0; i < spec.comm_types.size(); ++i) {
    const CommunicationType comm = spec.comm_types[i];
    const std::uint64_t seed = derive_seed(
        spec.base_seed, {seedtag::game, 0, static_cast<std::uint64_t>(spec.condition),
                         pattern_index(spec.pattern),
                         static_cast<std::uint64_t>(comm)});
    const ModelConfig config = spec.model.resolve(masked, comm, seed);
    const RunResult run = run_model(config, masked);
    Rng eval_rng(derive_seed(seed, {seedtag::eval}));
    report.rows.push_back(evaluate_crossmodal_state(
        run.state, config, masked, spec.category_prior, eval_rng));
  }

  nlohmann::json echo{
      {"condition", spec.condition},
      {"pattern", spec.pattern},
      {"seed", spec.base_seed},
      {"category_prior", spec.category_prior == CategoryPrior::Uniform
                             ? "uniform"
                             : "sign_marginalized"},
  };
  report.config_echo = std::move(echo);
  return report;
}

std::string crossmodal_table_csv(const CrossmodalReport& report) {
  std::string out = "comm_type";
  for (const std::string& m : report.modalities)
    out += "," + m + "_cos," + m + "_jsd";
  out += "\n";
  for (const CrossmodalRow& row : report.rows) {
    out += to_string(row.comm);
    for (std::size_t m = 0; m < report.modalities.size(); ++m) {
      out += ",";
      out += std::isnan(row.mean_cosine[m])
                 ? std::string()
                 : format_double(row.mean_cosine[m], 4);
      out += ",";
      out += std::isnan(row.mean_jsd[m]) ? std::string()
                                         : format_double(row.mean_jsd[m], 4);
    }
    out += "\n";
  }
  return out;
}

std::string crossmodal_details_jsonl(const CrossmodalReport& report) {
  std::string out;
  for (const CrossmodalRow& row : report.rows) {
    for (const CrossmodalDatum& datum : row.details) {
      nlohmann::json predicted = nlohmann::json::object();
      nlohmann::json nearest = nlohmann::json::object();
      nlohmann::json jsd_j = nlohmann::json::object();
      nlohmann::json cos_j = nlohmann::json::object();
      for (std::size_t m = 0; m < report.modalities.size(); ++m) {
        const std::string& name = report.modalities[m];
        if (datum.predicted.has(m)) predicted[name] = datum.predicted.at(m);
        if (datum.nearest[m].has_value()) nearest[name] = *datum.nearest[m];
        if (!std::isnan(datum.jsd[m])) jsd_j[name] = datum.jsd[m];
        if (!std::isnan(datum.cosine[m])) cos_j[name] = datum.cosine[m];
      }
      nlohmann::json j{
          {"comm_type", to_string(row.comm)}, {"d", datum.d},
          {"sign", datum.sign},               {"predicted", predicted},
          {"nearest", nearest},               {"jsd", jsd_j},
          {"cosine", cos_j},
      };
      out += j.dump();
      out += "\n";
    }
  }
  return out;
}

void write_crossmodal_report(const CrossmodalReport& report,
                             const std::string& out_dir) {
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  write_file(dir / "crossmodal.csv", crossmodal_table_csv(report));
  write_file(dir / "crossmodal.jsonl", crossmodal_details_jsonl(report));
  nlohmann::json j{{"schema", "intermdm-crossmodal-v1"},
                   {"config", report.config_echo},
                   {"modalities", report.modalities}};
  nlohmann::json rows = nlohmann::json::array();
  for (const CrossmodalRow& row : report.rows) {
    nlohmann::json cos_j = nlohmann::json::object();
    nlohmann::json jsd_j = nlohmann::json::object();
    for (std::size_t m = 0; m < report.modalities.size(); ++m) {
      if (!std::isnan(row.mean_cosine[m]))
        cos_j[report.modalities[m]] = row.mean_cosine[m];
      if (!std::isnan(row.mean_jsd[m]))
        jsd_j[report.modalities[m]] = row.mean_jsd[m];
    }
    rows.push_back({{"comm_type", to_string(row.comm)},
                    {"mean_cosine", cos_j},
                    {"mean_jsd", jsd_j}});
  }
  j["rows"] = std::move(rows);
  write_file(dir / "crossmodal.json", j.dump(2) + "\n");
}

}  // namespace intermdm
