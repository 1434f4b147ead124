// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Links only the C API from intermdm.h.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "intermdm.h"

namespace {

struct StringDeleter {
  void operator()(char* s) const { im_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

int fail(im_status status, const char* what) {
  std::fprintf(stderr, "intermdm: %s: %s\n", what, im_last_error());
  return static_cast<int>(status);
}

struct CommonOptions {
  std::string config_path;
  bool has_seed = false;
  std::uint64_t seed = 0;
  bool has_trials = false;
  std::uint64_t trials = 0;
  bool has_iterations = false;
  std::uint64_t iterations = 0;
  bool has_parallel = false;
  std::uint64_t parallel = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_run_flags) {
  cmd->add_option("--config", opts.config_path, "Config file (JSON)");
  cmd->add_option("--seed", opts.seed, "Base seed override")
      ->each([&](const std::string&) { opts.has_seed = true; });
  if (with_run_flags) {
    cmd->add_option("--trials", opts.trials, "Trials per cell")
        ->each([&](const std::string&) { opts.has_trials = true; });
    cmd->add_option("--iterations", opts.iterations, "Iterations per run")
        ->each([&](const std::string&) { opts.has_iterations = true; });
    cmd->add_option("--parallel", opts.parallel, "Worker threads for trials")
        ->each([&](const std::string&) { opts.has_parallel = true; });
  }
}

im_status make_config(const CommonOptions& opts, im_config** out) {
  im_status status = opts.config_path.empty()
                         ? im_config_default(out)
                         : im_config_from_file(opts.config_path.c_str(), out);
  if (status != IM_OK) return status;
  struct {
    bool set;
    const char* key;
    std::uint64_t value;
  } overrides[] = {
      {opts.has_seed, "seed", opts.seed},
      {opts.has_trials, "trials", opts.trials},
      {opts.has_iterations, "iterations", opts.iterations},
      {opts.has_parallel, "parallel", opts.parallel},
  };
  for (const auto& o : overrides) {
    if (!o.set) continue;
    status = im_config_set_u64(*out, o.key, o.value);
    if (status != IM_OK) {
      im_config_free(*out);
      *out = nullptr;
      return status;
    }
  }
  return IM_OK;
}

int cmd_generate(const CommonOptions& opts, const std::string& out_path) {
  im_config* config = nullptr;
  im_status status = make_config(opts, &config);
  if (status != IM_OK) return fail(status, "config");
  im_dataset* dataset = nullptr;
  status = im_dataset_generate(config, &dataset);
  im_config_free(config);
  if (status != IM_OK) return fail(status, "generate");
  status = im_dataset_save(dataset, out_path.c_str());
  uint32_t size = 0;
  im_dataset_size(dataset, &size);
  im_dataset_free(dataset);
  if (status != IM_OK) return fail(status, "save");
  std::printf("wrote %s (D=%u)\n", out_path.c_str(), size);
  return 0;
}

int cmd_run(const CommonOptions& opts, const std::string& out_dir,
            const std::string& format, const std::string& dataset_path) {
  im_config* config = nullptr;
  im_status status = make_config(opts, &config);
  if (status != IM_OK) return fail(status, "config");

  im_dataset* dataset = nullptr;
  if (!dataset_path.empty()) {
    status = im_dataset_load(dataset_path.c_str(), &dataset);
    if (status != IM_OK) {
      im_config_free(config);
      return fail(status, "dataset");
    }
  }

  im_results* results = nullptr;
  status = im_experiment_run(config, dataset, &results);
  im_dataset_free(dataset);
  im_config_free(config);
  if (status != IM_OK) return fail(status, "run");

  status = im_results_write(results, out_dir.c_str(), format.c_str());
  if (status != IM_OK) {
    im_results_free(results);
    return fail(status, "write");
  }
  OwnedString summary(im_results_summary(results));
  im_results_free(results);
  if (summary) std::fputs(summary.get(), stdout);
  std::printf("results written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_crossmodal(const CommonOptions& opts, const std::string& out_dir,
                   const std::string& dataset_path,
                   const std::string& state_path,
                   const std::string& save_state_path,
                   const std::string& comm_type) {
  im_config* config = nullptr;
  im_status status = make_config(opts, &config);
  if (status != IM_OK) return fail(status, "config");

  im_dataset* dataset = nullptr;
  if (!dataset_path.empty()) {
    status = im_dataset_load(dataset_path.c_str(), &dataset);
    if (status != IM_OK) {
      im_config_free(config);
      return fail(status, "dataset");
    }
  }

  im_crossmodal* report = nullptr;
  if (!state_path.empty()) {
    im_game* game = nullptr;
    status = im_game_load(state_path.c_str(), &game);
    if (status == IM_OK)
      status = im_crossmodal_eval_state(config, game, dataset, &report);
    im_game_free(game);
  } else if (!save_state_path.empty()) {
    im_game* game = nullptr;
    status = im_game_train(config, dataset,
                           comm_type.empty() ? nullptr : comm_type.c_str(),
                           &game);
    if (status == IM_OK) status = im_game_save(game, save_state_path.c_str());
    if (status == IM_OK)
      status = im_crossmodal_eval_state(config, game, dataset, &report);
    im_game_free(game);
  } else {
    status = im_crossmodal_run(config, dataset, &report);
  }
  im_dataset_free(dataset);
  im_config_free(config);
  if (status != IM_OK) return fail(status, "crossmodal");

  status = im_crossmodal_write(report, out_dir.c_str());
  if (status != IM_OK) {
    im_crossmodal_free(report);
    return fail(status, "write");
  }
  OwnedString table(im_crossmodal_csv(report));
  im_crossmodal_free(report);
  if (table) std::fputs(table.get(), stdout);
  std::printf("cross-modal report written to %s\n", out_dir.c_str());
  return 0;
}

int cmd_inspect(const std::string& bundle_path) {
  im_results* results = nullptr;
  im_status status = im_results_open(bundle_path.c_str(), &results);
  if (status != IM_OK) return fail(status, "inspect");
  OwnedString summary(im_results_summary(results));
  im_results_free(results);
  if (!summary) return fail(IM_ERR_RUNTIME, "inspect");
  std::fputs(summary.get(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Naming-game simulation over multimodal Dirichlet mixtures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", im_version());

  CommonOptions gen_opts;
  std::string gen_out = "dataset.json";
  CLI::App* generate =
      app.add_subcommand("generate", "Generate a synthetic dataset file");
  add_common(generate, gen_opts, false);
  generate->add_option("--out", gen_out, "Output dataset file");

  CommonOptions run_opts;
  std::string run_out = "results";
  std::string run_format = "all";
  std::string run_dataset;
  CLI::App* run = app.add_subcommand("run", "Run an experiment grid");
  add_common(run, run_opts, true);
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--format", run_format, "Trace format: csv, json or all")
      ->check(CLI::IsMember({"csv", "json", "all"}));
  run->add_option("--dataset", run_dataset,
                  "Dataset file overriding the config's data source");

  CommonOptions cm_opts;
  std::string cm_out = "crossmodal";
  std::string cm_dataset;
  std::string cm_state;
  std::string cm_save_state;
  std::string cm_comm;
  CLI::App* crossmodal = app.add_subcommand(
      "crossmodal", "Train and evaluate interpersonal cross-modal inference");
  add_common(crossmodal, cm_opts, false);
  crossmodal->add_option("--out", cm_out, "Output directory");
  crossmodal->add_option("--dataset", cm_dataset,
                         "Dataset file overriding the config's data source");
  crossmodal->add_option("--state", cm_state,
                         "Evaluate a saved game state instead of training");
  crossmodal->add_option("--save-state", cm_save_state,
                         "Train one game, save its state here, evaluate it");
  crossmodal->add_option(
      "--comm", cm_comm,
      "Communication type for --save-state (default proposed)");

  std::string inspect_path;
  CLI::App* inspect =
      app.add_subcommand("inspect", "Summarize a results bundle");
  inspect->add_option("bundle", inspect_path, "results.json path")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(IM_ERR_USAGE);
  }

  if (generate->parsed()) return cmd_generate(gen_opts, gen_out);
  if (run->parsed()) return cmd_run(run_opts, run_out, run_format, run_dataset);
  if (crossmodal->parsed())
    return cmd_crossmodal(cm_opts, cm_out, cm_dataset, cm_state, cm_save_state,
                          cm_comm);
  if (inspect->parsed()) return cmd_inspect(inspect_path);
  return static_cast<int>(IM_ERR_USAGE);
}
