// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "intermdm/error.hpp"

namespace intermdm {

namespace {

template <typename T>
T require(const nlohmann::json& j, const char* key) {
  if (!j.contains(key))
    throw_config(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw_config(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& config) {
  nlohmann::json v = nlohmann::json::object();
  nlohmann::json beta = nlohmann::json::object();
  for (std::size_t m = 0; m < config.modalities.size(); ++m) {
    v[config.modalities[m]] = config.bins[m];
    beta[config.modalities[m]] = config.beta[m];
  }
  nlohmann::json j{
      {"K", config.num_signs},
      {"L", config.num_categories},
      {"D", config.num_data},
      {"V", v},
      {"modalities", config.modalities},
      {"alpha", config.alpha},
      {"beta", beta},
      {"iterations", config.iterations},
      {"communication_type", to_string(config.communication)},
      {"seed", config.seed},
  };
  if (!config.gamma.empty())
    j["gamma"] = config.gamma;
  else
    j["gamma"] = "uniform";
  return j;
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig config;
  config.num_signs = require<std::uint32_t>(j, "K");
  config.num_categories = require<std::uint32_t>(j, "L");
  config.num_data = require<std::uint32_t>(j, "D");
  config.modalities = require<std::vector<std::string>>(j, "modalities");
  config.alpha = require<double>(j, "alpha");
  config.iterations = require<std::uint32_t>(j, "iterations");
  config.communication =
      communication_type_from_string(require<std::string>(j, "communication_type"));
  config.seed = require<std::uint64_t>(j, "seed");

  const auto& v = j.at("V");
  const auto& beta = j.at("beta");
  config.bins.clear();
  config.beta.clear();
  for (const std::string& name : config.modalities) {
    if (!v.contains(name))
      throw_config("V: missing modality '" + name + "'");
    if (!beta.contains(name))
      throw_config("beta: missing modality '" + name + "'");
    config.bins.push_back(v.at(name).get<std::uint32_t>());
    config.beta.push_back(beta.at(name).get<double>());
  }

  if (j.contains("gamma") && j.at("gamma").is_array())
    config.gamma = j.at("gamma").get<Simplex>();
  config.validate();
  return config;
}

nlohmann::json agent_state_to_json(const AgentState& agent,
                                   const std::vector<std::string>& modalities) {
  nlohmann::json j;
  nlohmann::json names = nlohmann::json::array();
  nlohmann::json phi = nlohmann::json::object();
  for (std::size_t m = 0; m < modalities.size(); ++m) {
    if (!agent.has_modality(m)) continue;
    names.push_back(modalities[m]);
    phi[modalities[m]] = agent.phi[m];
  }
  j["modalities"] = std::move(names);
  j["phi"] = std::move(phi);
  j["theta"] = agent.theta;
  j["c"] = agent.categories;
  return j;
}

AgentState agent_state_from_json(const nlohmann::json& j,
                                 const std::vector<std::string>& modalities) {
  AgentState agent;
  agent.modality_present.assign(modalities.size(), 0);
  agent.phi.assign(modalities.size(), {});
  const auto present = require<std::vector<std::string>>(j, "modalities");
  const auto& phi = j.at("phi");
  for (const std::string& name : present) {
    auto pos = std::find(modalities.begin(), modalities.end(), name);
    if (pos == modalities.end())
      throw_config("agent modalities: unknown modality '" + name + "'");
    const std::size_t m = static_cast<std::size_t>(pos - modalities.begin());
    agent.modality_present[m] = 1;
    if (!phi.contains(name))
      throw_config("agent phi: missing modality '" + name + "'");
    agent.phi[m] = phi.at(name).get<std::vector<Simplex>>();
  }
  agent.theta = require<std::vector<Simplex>>(j, "theta");
  agent.categories = require<std::vector<std::uint32_t>>(j, "c");
  return agent;
}

nlohmann::json game_state_to_json(const GameState& state,
                                  const std::vector<std::string>& modalities) {
  return nlohmann::json{
      {"agentA", agent_state_to_json(state.agent_a, modalities)},
      {"agentB", agent_state_to_json(state.agent_b, modalities)},
      {"wA", state.signs_a},
      {"wB", state.signs_b},
      {"iteration", state.iteration},
  };
}

GameState game_state_from_json(const nlohmann::json& j,
                               const std::vector<std::string>& modalities) {
  GameState state;
  if (!j.contains("agentA") || !j.contains("agentB"))
    throw_config("game state: missing agentA/agentB");
  state.agent_a = agent_state_from_json(j.at("agentA"), modalities);
  state.agent_b = agent_state_from_json(j.at("agentB"), modalities);
  state.signs_a = require<std::vector<std::uint32_t>>(j, "wA");
  state.signs_b = require<std::vector<std::uint32_t>>(j, "wB");
  state.iteration = require<std::uint32_t>(j, "iteration");
  return state;
}

void save_game_state(const GameState& state, const ModelConfig& config,
                     const std::string& path) {
  nlohmann::json j{
      {"schema", "intermdm-state-v1"},
      {"config", model_config_to_json(config)},
      {"state", game_state_to_json(state, config.modalities)},
  };
  std::ofstream out(path);
  if (!out) throw_runtime("cannot write state file: " + path);
  out << j.dump(2) << "\n";
}

LoadedGameState load_game_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open state file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_config("state '" + path + "': " + e.what());
  }
  LoadedGameState loaded;
  loaded.config = model_config_from_json(j.at("config"));
  loaded.state =
      game_state_from_json(j.at("state"), loaded.config.modalities);
  return loaded;
}

std::string format_double(double value, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
  return buf;
}

namespace {

std::string csv_field(double value) {
  return std::isnan(value) ? std::string() : format_double(value);
}

nlohmann::json json_field(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

}  // namespace

std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
  std::string out = kTraceCsvHeader;
  out += "\n";
  for (const IterationRecord& rec : trace) {
    out += std::to_string(rec.iteration);
    out += ",";
    out += csv_field(rec.ari_a);
    out += ",";
    out += csv_field(rec.ari_b);
    out += ",";
    out += csv_field(rec.ari_w);
    out += ",";
    out += csv_field(rec.kappa);
    out += ",";
    out += csv_field(rec.accept_rate_ab);
    out += ",";
    out += csv_field(rec.accept_rate_ba);
    out += "\n";
  }
  return out;
}

std::string trace_to_jsonl(const std::vector<IterationRecord>& trace) {
  std::string out;
  for (const IterationRecord& rec : trace) {
    nlohmann::json j{
        {"iteration", rec.iteration},
        {"ari_a", json_field(rec.ari_a)},
        {"ari_b", json_field(rec.ari_b)},
        {"ari_w", json_field(rec.ari_w)},
        {"kappa", json_field(rec.kappa)},
        {"accept_rate_ab", json_field(rec.accept_rate_ab)},
        {"accept_rate_ba", json_field(rec.accept_rate_ba)},
    };
    out += j.dump();
    out += "\n";
  }
  return out;
}

}  // namespace intermdm
