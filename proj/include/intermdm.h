/* Copyright 2026 the intermdm authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the intermdm shared library: two agents with multimodal
 * Dirichlet-mixture category models play a Metropolis-Hastings naming game
 * to converge on shared signs, with all-accept / all-reject baselines, an
 * integrated Gibbs sampler top line, and interpersonal cross-modal
 * inference.
 *
 * Every object is an opaque handle created by the library and released with
 * the matching *_free function. Functions return im_status; on failure the
 * thread-local message from im_last_error() describes what went wrong.
 * Functions returning char* hand ownership to the caller: release with
 * im_string_free(). NULL means the call failed.
 */

#ifndef INTERMDM_H
#define INTERMDM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef INTERMDM_API
#if defined(_WIN32)
#define INTERMDM_API
#else
#define INTERMDM_API __attribute__((visibility("default")))
#endif
#endif

/* Status codes; identical to the CLI exit codes. */
typedef enum im_status {
  IM_OK = 0,
  IM_ERR_USAGE = 1,
  IM_ERR_CONFIG = 2,
  IM_ERR_RUNTIME = 3
} im_status;

typedef struct im_config im_config;         /* experiment configuration */
typedef struct im_dataset im_dataset;       /* paired observation sets */
typedef struct im_results im_results;       /* experiment results bundle */
typedef struct im_game im_game;             /* one trained game state */
typedef struct im_crossmodal im_crossmodal; /* cross-modal report */

INTERMDM_API const char* im_version(void);

/* Message for the most recent failing call on this thread; empty string if
 * none. The pointer stays valid until the next failing call. */
INTERMDM_API const char* im_last_error(void);

INTERMDM_API void im_string_free(char* s);

/* ---- configuration ----------------------------------------------------- */

/* Built-in defaults: synthetic data, K = L = 15, D = 150, alpha = 0.01,
 * beta = 0.001, 200 iterations, 10 trials, condition 1, all four
 * communication types. */
INTERMDM_API im_status im_config_default(im_config** out);
INTERMDM_API im_status im_config_from_json(const char* json, im_config** out);
INTERMDM_API im_status im_config_from_file(const char* path, im_config** out);

/* Override one scalar field. Accepted keys: "seed", "trials", "iterations",
 * "parallel". */
INTERMDM_API im_status im_config_set_u64(im_config* config, const char* key,
                                         uint64_t value);
INTERMDM_API char* im_config_to_json(const im_config* config);
INTERMDM_API void im_config_free(im_config* config);

/* ---- datasets ----------------------------------------------------------- */

/* Generate a synthetic dataset from the config's data section (the stream
 * used for trial 0 of an experiment with the same seed). */
INTERMDM_API im_status im_dataset_generate(const im_config* config,
                                           im_dataset** out);
INTERMDM_API im_status im_dataset_load(const char* path, im_dataset** out);
INTERMDM_API im_status im_dataset_save(const im_dataset* dataset,
                                       const char* path);
INTERMDM_API im_status im_dataset_size(const im_dataset* dataset,
                                       uint32_t* out);
INTERMDM_API void im_dataset_free(im_dataset* dataset);

/* ---- experiments -------------------------------------------------------- */

/* Run the configured grid of (condition, pattern) x communication type x
 * trials. A non-NULL dataset is shared by every trial; otherwise the
 * config's data source is used (the synthetic generator draws a fresh
 * dataset per trial). */
INTERMDM_API im_status im_experiment_run(const im_config* config,
                                         const im_dataset* dataset,
                                         im_results** out);

/* Results table in the fixed CSV layout (condition, pattern, comm_type,
 * ari_a_mean, ari_a_sd, ari_a_p, ari_b_mean, ari_b_sd, ari_b_p, kappa_mean,
 * ari_w_mean). Only available on handles produced by im_experiment_run. */
INTERMDM_API char* im_results_csv(const im_results* results);

/* Self-describing JSON bundle with aggregates, per-trial finals and full
 * per-iteration traces. Replaying the bundle as a config reproduces it. */
INTERMDM_API char* im_results_json(const im_results* results);

/* Human-readable summary table. */
INTERMDM_API char* im_results_summary(const im_results* results);

/* Write results.csv, results.json and traces (format: "csv", "json" or
 * "all") into a directory, creating it if needed. Only available on handles
 * produced by im_experiment_run. */
INTERMDM_API im_status im_results_write(const im_results* results,
                                        const char* out_dir,
                                        const char* format);

/* Open a previously written results.json bundle for inspection. Such a
 * handle supports im_results_json and im_results_summary only. */
INTERMDM_API im_status im_results_open(const char* path, im_results** out);
INTERMDM_API void im_results_free(im_results* results);

/* ---- trained states and cross-modal inference --------------------------- */

/* Train one game on the config's condition/pattern (crossmodal section;
 * defaults to condition 1). comm_type is one of "proposed", "all_accept",
 * "all_reject", "integrated_gibbs"; NULL means "proposed". A non-NULL
 * dataset overrides the config's data source. */
INTERMDM_API im_status im_game_train(const im_config* config,
                                     const im_dataset* dataset,
                                     const char* comm_type, im_game** out);
INTERMDM_API im_status im_game_save(const im_game* game, const char* path);
INTERMDM_API im_status im_game_load(const char* path, im_game** out);
INTERMDM_API void im_game_free(im_game* game);

/* Train every communication type listed in the config's crossmodal section
 * and evaluate interpersonal cross-modal inference for each: agent A utters
 * a sign per datum, agent B imagines the observation, and the imagined
 * histograms are scored against agent A's by cosine similarity and JSD. */
INTERMDM_API im_status im_crossmodal_run(const im_config* config,
                                         const im_dataset* dataset,
                                         im_crossmodal** out);

/* Evaluate one already-trained state instead of training in-line. The
 * dataset must be the one the state was trained on (NULL regenerates it
 * from the config). */
INTERMDM_API im_status im_crossmodal_eval_state(const im_config* config,
                                                const im_game* game,
                                                const im_dataset* dataset,
                                                im_crossmodal** out);

/* Mean cosine / JSD per modality and communication type, as CSV. */
INTERMDM_API char* im_crossmodal_csv(const im_crossmodal* report);

/* Per-datum detail: one JSON object per line with (comm_type, d, sign,
 * predicted histograms, nearest candidate index, jsd, cosine). */
INTERMDM_API char* im_crossmodal_jsonl(const im_crossmodal* report);

INTERMDM_API im_status im_crossmodal_write(const im_crossmodal* report,
                                           const char* out_dir);
INTERMDM_API void im_crossmodal_free(im_crossmodal* report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* INTERMDM_H */
