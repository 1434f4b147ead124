// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "intermdm/inference.hpp"
#include "intermdm/model.hpp"

namespace intermdm {

// Checkpoint schema for configs and game states. Field names follow the
// documented JSON schema: K, L, D, V, alpha, beta, gamma, iterations,
// communication_type, seed; agentA/agentB/wA/wB/iteration; and per agent
// modalities/phi/theta/c.

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json agent_state_to_json(const AgentState& agent,
                                   const std::vector<std::string>& modalities);
AgentState agent_state_from_json(const nlohmann::json& j,
                                 const std::vector<std::string>& modalities);

nlohmann::json game_state_to_json(const GameState& state,
                                  const std::vector<std::string>& modalities);
GameState game_state_from_json(const nlohmann::json& j,
                               const std::vector<std::string>& modalities);

void save_game_state(const GameState& state, const ModelConfig& config,
                     const std::string& path);

struct LoadedGameState {
  GameState state;
  ModelConfig config;
};

LoadedGameState load_game_state(const std::string& path);

/// Fixed-point float formatting used by every CSV / JSON-lines writer so
/// that identical runs produce byte-identical files.
std::string format_double(double value, int precision = 6);

inline constexpr const char* kTraceCsvHeader =
    "iteration,ari_a,ari_b,ari_w,kappa,accept_rate_ab,accept_rate_ba";

/// One CSV line per iteration record; NaN fields (integrated sampler) are
/// left empty.
std::string trace_to_csv(const std::vector<IterationRecord>& trace);

/// One JSON object per line; NaN fields become null.
std::string trace_to_jsonl(const std::vector<IterationRecord>& trace);

}  // namespace intermdm
