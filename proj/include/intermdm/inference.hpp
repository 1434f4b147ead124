// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "intermdm/model.hpp"
#include "intermdm/synthdata.hpp"

namespace intermdm {

/// Per-iteration diagnostics. kappa and the acceptance rates are NaN for
/// the integrated sampler, which has no proposal step and a single shared
/// sign sequence.
struct IterationRecord {
  std::uint32_t iteration = 0;
  double ari_a = 0.0;
  double ari_b = 0.0;
  double ari_w = 0.0;  // computed on the A-side sign copy
  double kappa = 0.0;
  double accept_rate_ab = 0.0;  // A speaking, B listening
  double accept_rate_ba = 0.0;
};

struct RunResult {
  GameState state;
  std::vector<IterationRecord> trace;
};

/// Sample a sign for a category by inverting the sign->category rows:
/// P(k) proportional to gamma[k] * theta[k][category]. Throws when every
/// sign gives the category zero mass.
std::uint32_t propose_sign(std::uint32_t category,
                           const std::vector<Simplex>& theta,
                           const Simplex& gamma, Rng& rng);

/// Listener-side acceptance probability for a proposed sign:
/// min(1, theta[proposed][c] / theta[current][c]). A zero denominator with
/// a positive numerator accepts with certainty; zero over zero also returns
/// 1 but logs a warning since the state is degenerate.
double acceptance_ratio(std::uint32_t listener_category,
                        const std::vector<Simplex>& listener_theta,
                        std::uint32_t proposed_sign,
                        std::uint32_t current_sign);

/// One half-iteration of the naming game: the speaker proposes a sign per
/// datum from its own categories, the listener accepts each with the M-H
/// ratio (forced to 1 / 0 under AllAccept / AllReject), then redraws its
/// emission rows, theta rows and category assignments from the full
/// conditionals given the updated signs. Only the listener and its sign
/// copy are mutated. Returns the per-datum acceptance flags.
std::vector<std::uint8_t> mh_exchange(const AgentState& speaker,
                                      AgentState& listener,
                                      const std::vector<Observation>& listener_obs,
                                      std::vector<std::uint32_t>& listener_signs,
                                      const ModelConfig& config, Rng& rng);

/// Fresh state for the naming game: both agents from their priors, each
/// agent's sign copy drawn from the sign prior.
GameState init_naming_game_state(const ModelConfig& config,
                                 const Dataset& dataset, Rng& rng);

/// Fresh state for the integrated sampler: one shared sign sequence,
/// mirrored into both per-agent copies.
GameState init_gibbs_state(const ModelConfig& config, const Dataset& dataset,
                           Rng& rng);

struct ExchangeCounts {
  std::uint32_t accepted_ab = 0;
  std::uint32_t accepted_ba = 0;
};

/// One full iteration: A speaks to B, then B speaks to A.
ExchangeCounts naming_game_iteration(GameState& state,
                                     const ModelConfig& config,
                                     const Dataset& dataset, Rng& rng);

/// One sweep of the integrated sampler: all emission and theta rows of both
/// agents, then per datum both categories and the shared sign.
void gibbs_sweep(GameState& state, const ModelConfig& config,
                 const Dataset& dataset, Rng& rng);

/// Full naming-game run (Proposed / AllAccept / AllReject) with one trace
/// record per iteration. Runs config.iterations iterations; zero is allowed
/// and returns the freshly initialized state with an empty trace.
RunResult run_naming_game(const ModelConfig& config, const Dataset& dataset);

/// Full integrated-sampler run; trace schema identical to the naming game.
RunResult gibbs_integrated(const ModelConfig& config, const Dataset& dataset);

/// Dispatch on config.communication.
RunResult run_model(const ModelConfig& config, const Dataset& dataset);

}  // namespace intermdm
