// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>

#include "intermdm/error.hpp"
#include "intermdm/harness.hpp"
#include "intermdm/serialize.hpp"
#include "intermdm/synthdata.hpp"

namespace {

thread_local std::string t_last_error;

im_status status_from_exception() {
  try {
    throw;
  } catch (const intermdm::Error& e) {
    t_last_error = e.what();
    return static_cast<im_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return IM_ERR_RUNTIME;
  } catch (...) {
    t_last_error = "unknown error";
    return IM_ERR_RUNTIME;
  }
}

template <typename Fn>
im_status guard(Fn&& fn) {
  try {
    fn();
    return IM_OK;
  } catch (...) {
    return status_from_exception();
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
char* guard_string(Fn&& fn) {
  try {
    return dup_string(fn());
  } catch (...) {
    status_from_exception();
    return nullptr;
  }
}

}  // namespace

struct im_config {
  nlohmann::json raw;
};

struct im_dataset {
  intermdm::Dataset dataset;
};

struct im_results {
  // Either computed by a run (full struct) or opened from disk (bundle only).
  std::optional<intermdm::ExperimentResults> computed;
  nlohmann::json bundle;
};

struct im_game {
  intermdm::GameState state;
  intermdm::ModelConfig config;
};

struct im_crossmodal {
  intermdm::CrossmodalReport report;
};

extern "C" {

const char* im_version(void) { return "0.1.0"; }

const char* im_last_error(void) { return t_last_error.c_str(); }

void im_string_free(char* s) { std::free(s); }

im_status im_config_default(im_config** out) {
  return guard([&] {
    if (out == nullptr) intermdm::throw_usage("out must not be NULL");
    *out = new im_config{nlohmann::json::object()};
  });
}

im_status im_config_from_json(const char* json, im_config** out) {
  return guard([&] {
    if (json == nullptr || out == nullptr)
      intermdm::throw_usage("json and out must not be NULL");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      intermdm::throw_config(std::string("config JSON: ") + e.what());
    }
    intermdm::experiment_spec_from_json(j);  // validate eagerly
    *out = new im_config{std::move(j)};
  });
}

im_status im_config_from_file(const char* path, im_config** out) {
  return guard([&] {
    if (path == nullptr || out == nullptr)
      intermdm::throw_usage("path and out must not be NULL");
    std::ifstream in(path);
    if (!in) intermdm::throw_config(std::string("cannot open config file: ") + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      intermdm::throw_config(std::string("config '") + path + "': " + e.what());
    }
    intermdm::experiment_spec_from_json(j);
    *out = new im_config{std::move(j)};
  });
}

im_status im_config_set_u64(im_config* config, const char* key,
                            uint64_t value) {
  return guard([&] {
    if (config == nullptr || key == nullptr)
      intermdm::throw_usage("config and key must not be NULL");
    const std::string name(key);
    if (name == "seed") {
      config->raw["experiment"]["seed"] = value;
    } else if (name == "trials") {
      config->raw["experiment"]["trials"] = value;
    } else if (name == "parallel") {
      config->raw["experiment"]["parallel"] = value;
    } else if (name == "iterations") {
      config->raw["model"]["iterations"] = value;
    } else {
      intermdm::throw_usage("unknown config key '" + name +
                            "' (expected seed|trials|iterations|parallel)");
    }
    intermdm::experiment_spec_from_json(config->raw);  // keep it valid
  });
}

char* im_config_to_json(const im_config* config) {
  return guard_string([&]() -> std::string {
    if (config == nullptr) intermdm::throw_usage("config must not be NULL");
    return intermdm::experiment_spec_to_json(
               intermdm::experiment_spec_from_json(config->raw))
        .dump(2);
  });
}

void im_config_free(im_config* config) { delete config; }

im_status im_dataset_generate(const im_config* config, im_dataset** out) {
  return guard([&] {
    if (config == nullptr || out == nullptr)
      intermdm::throw_usage("config and out must not be NULL");
    const intermdm::ExperimentSpec spec =
        intermdm::experiment_spec_from_json(config->raw);
    if (spec.data.from_file) {
      *out = new im_dataset{
          intermdm::load_histogram_dataset(spec.data.path)};
      return;
    }
    intermdm::Rng rng(
        intermdm::derive_seed(spec.base_seed, {intermdm::seedtag::data, 0}));
    *out = new im_dataset{
        intermdm::generate_synthetic(spec.data.synthetic, rng)};
  });
}

im_status im_dataset_load(const char* path, im_dataset** out) {
  return guard([&] {
    if (path == nullptr || out == nullptr)
      intermdm::throw_usage("path and out must not be NULL");
    *out = new im_dataset{intermdm::load_histogram_dataset(path)};
  });
}

im_status im_dataset_save(const im_dataset* dataset, const char* path) {
  return guard([&] {
    if (dataset == nullptr || path == nullptr)
      intermdm::throw_usage("dataset and path must not be NULL");
    intermdm::save_dataset(dataset->dataset, path);
  });
}

im_status im_dataset_size(const im_dataset* dataset, uint32_t* out) {
  return guard([&] {
    if (dataset == nullptr || out == nullptr)
      intermdm::throw_usage("dataset and out must not be NULL");
    *out = dataset->dataset.size();
  });
}

void im_dataset_free(im_dataset* dataset) { delete dataset; }

im_status im_experiment_run(const im_config* config, const im_dataset* dataset,
                            im_results** out) {
  return guard([&] {
    if (config == nullptr || out == nullptr)
      intermdm::throw_usage("config and out must not be NULL");
    const intermdm::ExperimentSpec spec =
        intermdm::experiment_spec_from_json(config->raw);
    intermdm::ExperimentResults results = intermdm::run_experiment(
        spec, dataset == nullptr ? nullptr : &dataset->dataset);
    auto* handle = new im_results;
    handle->bundle = intermdm::results_to_json(results);
    handle->computed = std::move(results);
    *out = handle;
  });
}

char* im_results_csv(const im_results* results) {
  return guard_string([&]() -> std::string {
    if (results == nullptr) intermdm::throw_usage("results must not be NULL");
    if (!results->computed.has_value())
      intermdm::throw_usage("CSV is only available on freshly run results");
    return intermdm::results_to_csv(*results->computed);
  });
}

char* im_results_json(const im_results* results) {
  return guard_string([&]() -> std::string {
    if (results == nullptr) intermdm::throw_usage("results must not be NULL");
    return results->bundle.dump(2) + "\n";
  });
}

char* im_results_summary(const im_results* results) {
  return guard_string([&]() -> std::string {
    if (results == nullptr) intermdm::throw_usage("results must not be NULL");
    return intermdm::summarize_results_json(results->bundle);
  });
}

im_status im_results_write(const im_results* results, const char* out_dir,
                           const char* format) {
  return guard([&] {
    if (results == nullptr || out_dir == nullptr)
      intermdm::throw_usage("results and out_dir must not be NULL");
    if (!results->computed.has_value())
      intermdm::throw_usage("write is only available on freshly run results");
    intermdm::write_results(*results->computed, out_dir,
                            format == nullptr ? "all" : format);
  });
}

im_status im_results_open(const char* path, im_results** out) {
  return guard([&] {
    if (path == nullptr || out == nullptr)
      intermdm::throw_usage("path and out must not be NULL");
    std::ifstream in(path);
    if (!in)
      intermdm::throw_config(std::string("cannot open results bundle: ") + path);
    auto* handle = new im_results;
    try {
      in >> handle->bundle;
    } catch (const nlohmann::json::exception& e) {
      delete handle;
      intermdm::throw_config(std::string("results '") + path + "': " + e.what());
    }
    if (handle->bundle.value("schema", "") !=
        std::string("intermdm-results-v1")) {
      delete handle;
      intermdm::throw_config(std::string(path) +
                             ": not an intermdm results bundle");
    }
    *out = handle;
  });
}

void im_results_free(im_results* results) { delete results; }

namespace {

intermdm::Dataset crossmodal_dataset(const intermdm::CrossmodalSpec& spec,
                                     const im_dataset* dataset) {
  intermdm::Dataset base;
  if (dataset != nullptr) {
    base = dataset->dataset;
  } else if (spec.data.from_file) {
    base = intermdm::load_histogram_dataset(spec.data.path);
  } else {
    intermdm::Rng rng(
        intermdm::derive_seed(spec.base_seed, {intermdm::seedtag::data, 0}));
    base = intermdm::generate_synthetic(spec.data.synthetic, rng);
  }
  const intermdm::ConditionSpec cond = intermdm::ConditionSpec::make(
      spec.condition, spec.pattern, base.modalities.size());
  return intermdm::apply_condition(base, cond);
}

}  // namespace

im_status im_game_train(const im_config* config, const im_dataset* dataset,
                        const char* comm_type, im_game** out) {
  return guard([&] {
    if (config == nullptr || out == nullptr)
      intermdm::throw_usage("config and out must not be NULL");
    const intermdm::CrossmodalSpec spec =
        intermdm::crossmodal_spec_from_json(config->raw);
    const intermdm::CommunicationType comm =
        comm_type == nullptr
            ? intermdm::CommunicationType::Proposed
            : intermdm::communication_type_from_string(comm_type);
    const intermdm::Dataset masked = crossmodal_dataset(spec, dataset);
    const std::uint64_t seed = intermdm::derive_seed(
        spec.base_seed,
        {intermdm::seedtag::game, 0, static_cast<std::uint64_t>(spec.condition),
         intermdm::pattern_index(spec.pattern),
         static_cast<std::uint64_t>(comm)});
    const intermdm::ModelConfig model = spec.model.resolve(masked, comm, seed);
    intermdm::RunResult run = intermdm::run_model(model, masked);
    *out = new im_game{std::move(run.state), model};
  });
}

im_status im_game_save(const im_game* game, const char* path) {
  return guard([&] {
    if (game == nullptr || path == nullptr)
      intermdm::throw_usage("game and path must not be NULL");
    intermdm::save_game_state(game->state, game->config, path);
  });
}

im_status im_game_load(const char* path, im_game** out) {
  return guard([&] {
    if (path == nullptr || out == nullptr)
      intermdm::throw_usage("path and out must not be NULL");
    intermdm::LoadedGameState loaded = intermdm::load_game_state(path);
    *out = new im_game{std::move(loaded.state), std::move(loaded.config)};
  });
}

void im_game_free(im_game* game) { delete game; }

im_status im_crossmodal_run(const im_config* config, const im_dataset* dataset,
                            im_crossmodal** out) {
  return guard([&] {
    if (config == nullptr || out == nullptr)
      intermdm::throw_usage("config and out must not be NULL");
    const intermdm::CrossmodalSpec spec =
        intermdm::crossmodal_spec_from_json(config->raw);
    *out = new im_crossmodal{intermdm::run_crossmodal_eval(
        spec, dataset == nullptr ? nullptr : &dataset->dataset)};
  });
}

im_status im_crossmodal_eval_state(const im_config* config, const im_game* game,
                                   const im_dataset* dataset,
                                   im_crossmodal** out) {
  return guard([&] {
    if (config == nullptr || game == nullptr || out == nullptr)
      intermdm::throw_usage("config, game and out must not be NULL");
    const intermdm::CrossmodalSpec spec =
        intermdm::crossmodal_spec_from_json(config->raw);
    const intermdm::Dataset masked = crossmodal_dataset(spec, dataset);
    intermdm::Rng rng(
        intermdm::derive_seed(game->config.seed, {intermdm::seedtag::eval}));
    intermdm::CrossmodalReport report;
    report.modalities = masked.modalities;
    report.config_echo = {{"condition", spec.condition},
                          {"pattern", spec.pattern},
                          {"seed", spec.base_seed},
                          {"state_comm_type",
                           intermdm::to_string(game->config.communication)}};
    report.rows.push_back(intermdm::evaluate_crossmodal_state(
        game->state, game->config, masked, spec.category_prior, rng));
    *out = new im_crossmodal{std::move(report)};
  });
}

char* im_crossmodal_csv(const im_crossmodal* report) {
  return guard_string([&]() -> std::string {
    if (report == nullptr) intermdm::throw_usage("report must not be NULL");
    return intermdm::crossmodal_table_csv(report->report);
  });
}

char* im_crossmodal_jsonl(const im_crossmodal* report) {
  return guard_string([&]() -> std::string {
    if (report == nullptr) intermdm::throw_usage("report must not be NULL");
    return intermdm::crossmodal_details_jsonl(report->report);
  });
}

im_status im_crossmodal_write(const im_crossmodal* report,
                              const char* out_dir) {
  return guard([&] {
    if (report == nullptr || out_dir == nullptr)
      intermdm::throw_usage("report and out_dir must not be NULL");
    intermdm::write_crossmodal_report(report->report, out_dir);
  });
}

void im_crossmodal_free(im_crossmodal* report) { delete report; }

}  // extern "C"
