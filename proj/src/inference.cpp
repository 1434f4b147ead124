// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/inference.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "intermdm/error.hpp"
#include "intermdm/metrics.hpp"

namespace intermdm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log tables for the category resampling hot path. Rebuilt once per
// exchange / sweep instead of per datum.
struct LogTables {
  std::vector<std::vector<std::vector<double>>> log_phi;  // [m][l][v]
  std::vector<std::vector<double>> log_theta;             // [k][l]
};

LogTables build_log_tables(const AgentState& agent) {
  LogTables t;
  t.log_phi.resize(agent.phi.size());
  for (std::size_t m = 0; m < agent.phi.size(); ++m) {
    t.log_phi[m].resize(agent.phi[m].size());
    for (std::size_t l = 0; l < agent.phi[m].size(); ++l) {
      const Simplex& row = agent.phi[m][l];
      auto& out = t.log_phi[m][l];
      out.resize(row.size());
      for (std::size_t v = 0; v < row.size(); ++v)
        out[v] = row[v] > 0.0 ? std::log(row[v]) : kNegInf;
    }
  }
  t.log_theta.resize(agent.theta.size());
  for (std::size_t k = 0; k < agent.theta.size(); ++k) {
    const Simplex& row = agent.theta[k];
    t.log_theta[k].resize(row.size());
    for (std::size_t l = 0; l < row.size(); ++l)
      t.log_theta[k][l] = row[l] > 0.0 ? std::log(row[l]) : kNegInf;
  }
  return t;
}

// Coefficient-free log likelihood of one observation under category l,
// summed over the modalities the agent has.
double observation_log_lik(const Observation& o, const LogTables& t,
                           std::size_t l) {
  double acc = 0.0;
  for (std::size_t m = 0; m < o.by_modality.size(); ++m) {
    if (!o.has(m)) continue;
    const Histogram& h = o.at(m);
    const auto& lp = t.log_phi[m][l];
    for (std::size_t v = 0; v < h.size(); ++v) {
      if (h[v] == 0) continue;
      if (lp[v] == kNegInf) return kNegInf;
      acc += static_cast<double>(h[v]) * lp[v];
    }
  }
  return acc;
}

void resample_phi(AgentState& agent, const std::vector<Observation>& obs,
                  const ModelConfig& config, Rng& rng) {
  for (ModalityId m = 0; m < config.modalities.size(); ++m) {
    if (!agent.has_modality(m)) continue;
    for (std::uint32_t l = 0; l < config.num_categories; ++l)
      agent.phi[m][l] = sample_dirichlet(
          posterior_phi(obs, agent.categories, l, m, config.beta[m],
                        config.bins[m]),
          rng);
  }
}

void resample_theta(AgentState& agent, const std::vector<std::uint32_t>& signs,
                    const ModelConfig& config, Rng& rng) {
  for (std::uint32_t k = 0; k < config.num_signs; ++k)
    agent.theta[k] = sample_dirichlet(
        posterior_theta(agent.categories, signs, k, config.alpha,
                        config.num_categories),
        rng);
}

void resample_categories(AgentState& agent,
                         const std::vector<Observation>& obs,
                         const std::vector<std::uint32_t>& signs,
                         const ModelConfig& config, Rng& rng) {
  const LogTables tables = build_log_tables(agent);
  std::vector<double> log_weights(config.num_categories);
  for (std::size_t d = 0; d < obs.size(); ++d) {
    const auto& log_prior = tables.log_theta[signs[d]];
    for (std::uint32_t l = 0; l < config.num_categories; ++l)
      log_weights[l] = log_prior[l] + observation_log_lik(obs[d], tables, l);
    agent.categories[d] = sample_index_from_log_weights(log_weights, rng);
  }
}

IterationRecord make_record(const GameState& state, const Dataset& dataset,
                            std::uint32_t iteration, double accept_ab,
                            double accept_ba, bool naming_game) {
  IterationRecord rec;
  rec.iteration = iteration;
  rec.ari_a = ari(state.agent_a.categories, dataset.true_labels);
  rec.ari_b = ari(state.agent_b.categories, dataset.true_labels);
  rec.ari_w = ari(state.signs_a, dataset.true_labels);
  rec.kappa = naming_game ? kappa(state.signs_a, state.signs_b) : kNaN;
  rec.accept_rate_ab = naming_game ? accept_ab : kNaN;
  rec.accept_rate_ba = naming_game ? accept_ba : kNaN;
  return rec;
}

void check_dataset(const ModelConfig& config, const Dataset& dataset) {
  if (dataset.size() != config.num_data)
    throw_config("dataset size does not match D");
  if (dataset.modalities != config.modalities)
    throw_config("dataset modalities do not match the model configuration");
  if (dataset.bins != config.bins)
    throw_config("dataset bin counts do not match the model configuration");
  if (dataset.observations_a.size() != dataset.true_labels.size() ||
      dataset.observations_b.size() != dataset.true_labels.size())
    throw_config("dataset observation/label lengths disagree");
}

}  // namespace

std::uint32_t propose_sign(std::uint32_t category,
                           const std::vector<Simplex>& theta,
                           const Simplex& gamma, Rng& rng) {
  if (theta.empty() || gamma.size() != theta.size())
    throw_runtime("propose_sign: gamma/theta size mismatch");
  std::vector<double> weights(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (category >= theta[k].size())
      throw_runtime("propose_sign: category index out of range");
    weights[k] = gamma[k] * theta[k][category];
  }
  return sample_index_from_weights(weights, rng);
}

double acceptance_ratio(std::uint32_t listener_category,
                        const std::vector<Simplex>& listener_theta,
                        std::uint32_t proposed_sign,
                        std::uint32_t current_sign) {
  if (proposed_sign >= listener_theta.size() ||
      current_sign >= listener_theta.size())
    throw_runtime("acceptance_ratio: sign index out of range");
  if (listener_category >= listener_theta[proposed_sign].size())
    throw_runtime("acceptance_ratio: category index out of range");
  if (proposed_sign == current_sign) return 1.0;

  const double numerator = listener_theta[proposed_sign][listener_category];
  const double denominator = listener_theta[current_sign][listener_category];
  if (denominator <= 0.0) {
    if (numerator <= 0.0)
      std::fprintf(stderr,
                   "intermdm: warning: acceptance ratio 0/0 for category %u "
                   "(degenerate theta rows)\n",
                   listener_category);
    return 1.0;
  }
  return std::min(1.0, numerator / denominator);
}

std::vector<std::uint8_t> mh_exchange(const AgentState& speaker,
                                      AgentState& listener,
                                      const std::vector<Observation>& listener_obs,
                                      std::vector<std::uint32_t>& listener_signs,
                                      const ModelConfig& config, Rng& rng) {
  if (listener_signs.size() != listener_obs.size() ||
      listener.categories.size() != listener_obs.size() ||
      speaker.categories.size() != listener_obs.size())
    throw_runtime("mh_exchange: state sizes disagree");
  if (config.communication == CommunicationType::IntegratedGibbs)
    throw_runtime("mh_exchange: the integrated sampler has no exchanges");

  const Simplex gamma = config.sign_prior();
  std::vector<std::uint8_t> accepted(listener_obs.size(), 0);

  for (std::size_t d = 0; d < listener_obs.size(); ++d) {
    const std::uint32_t proposal =
        propose_sign(speaker.categories[d], speaker.theta, gamma, rng);
    double z;
    switch (config.communication) {
      case CommunicationType::AllAccept: z = 1.0; break;
      case CommunicationType::AllReject: z = 0.0; break;
      default:
        z = acceptance_ratio(listener.categories[d], listener.theta, proposal,
                             listener_signs[d]);
        break;
    }
    // u lies in (0, 1], so forced z = 0 never accepts and z = 1 always does.
    if (rng.uniform01_open() <= z) {
      listener_signs[d] = proposal;
      accepted[d] = 1;
    }
  }

  resample_phi(listener, listener_obs, config, rng);
  resample_theta(listener, listener_signs, config, rng);
  resample_categories(listener, listener_obs, listener_signs, config, rng);
  return accepted;
}

GameState init_naming_game_state(const ModelConfig& config,
                                 const Dataset& dataset, Rng& rng) {
  check_dataset(config, dataset);
  GameState state;
  state.agent_a = init_agent(config, dataset.observations_a, rng);
  state.agent_b = init_agent(config, dataset.observations_b, rng);
  const Simplex gamma = config.sign_prior();
  state.signs_a.resize(config.num_data);
  state.signs_b.resize(config.num_data);
  for (std::uint32_t& w : state.signs_a) w = sample_categorical(gamma, rng);
  for (std::uint32_t& w : state.signs_b) w = sample_categorical(gamma, rng);
  return state;
}

GameState init_gibbs_state(const ModelConfig& config, const Dataset& dataset,
                           Rng& rng) {
  check_dataset(config, dataset);
  GameState state;
  state.agent_a = init_agent(config, dataset.observations_a, rng);
  state.agent_b = init_agent(config, dataset.observations_b, rng);
  const Simplex gamma = config.sign_prior();
  state.signs_a.resize(config.num_data);
  for (std::uint32_t& w : state.signs_a) w = sample_categorical(gamma, rng);
  state.signs_b = state.signs_a;
  return state;
}

ExchangeCounts naming_game_iteration(GameState& state,
                                     const ModelConfig& config,
                                     const Dataset& dataset, Rng& rng) {
  ExchangeCounts counts;
  // A speaks, B listens; then B speaks with its updated state, A listens.
  const std::vector<std::uint8_t> ab =
      mh_exchange(state.agent_a, state.agent_b, dataset.observations_b,
                  state.signs_b, config, rng);
  const std::vector<std::uint8_t> ba =
      mh_exchange(state.agent_b, state.agent_a, dataset.observations_a,
                  state.signs_a, config, rng);
  for (std::uint8_t f : ab) counts.accepted_ab += f;
  for (std::uint8_t f : ba) counts.accepted_ba += f;
  return counts;
}

void gibbs_sweep(GameState& state, const ModelConfig& config,
                 const Dataset& dataset, Rng& rng) {
  resample_phi(state.agent_a, dataset.observations_a, config, rng);
  resample_phi(state.agent_b, dataset.observations_b, config, rng);
  resample_theta(state.agent_a, state.signs_a, config, rng);
  resample_theta(state.agent_b, state.signs_b, config, rng);

  const LogTables tables_a = build_log_tables(state.agent_a);
  const LogTables tables_b = build_log_tables(state.agent_b);
  const Simplex gamma = config.sign_prior();
  std::vector<double> log_gamma(config.num_signs);
  for (std::uint32_t k = 0; k < config.num_signs; ++k)
    log_gamma[k] = gamma[k] > 0.0 ? std::log(gamma[k]) : kNegInf;

  std::vector<double> log_weights(
      std::max<std::size_t>(config.num_categories, config.num_signs));

  for (std::size_t d = 0; d < dataset.true_labels.size(); ++d) {
    // Categories condition on the sign from the previous sweep.
    const std::uint32_t old_sign = state.signs_a[d];
    for (std::uint32_t l = 0; l < config.num_categories; ++l)
      log_weights[l] =
          tables_a.log_theta[old_sign][l] +
          observation_log_lik(dataset.observations_a[d], tables_a, l);
    const std::uint32_t ca = sample_index_from_log_weights(
        {log_weights.data(), config.num_categories}, rng);
    state.agent_a.categories[d] = ca;

    for (std::uint32_t l = 0; l < config.num_categories; ++l)
      log_weights[l] =
          tables_b.log_theta[old_sign][l] +
          observation_log_lik(dataset.observations_b[d], tables_b, l);
    const std::uint32_t cb = sample_index_from_log_weights(
        {log_weights.data(), config.num_categories}, rng);
    state.agent_b.categories[d] = cb;

    // Shared sign from the product of both agents' theta columns.
    for (std::uint32_t k = 0; k < config.num_signs; ++k)
      log_weights[k] = log_gamma[k] + tables_a.log_theta[k][ca] +
                       tables_b.log_theta[k][cb];
    const std::uint32_t w = sample_index_from_log_weights(
        {log_weights.data(), config.num_signs}, rng);
    state.signs_a[d] = w;
    state.signs_b[d] = w;
  }
}

RunResult run_naming_game(const ModelConfig& config, const Dataset& dataset) {
  if (config.communication == CommunicationType::IntegratedGibbs)
    throw_config("run_naming_game: use gibbs_integrated for the integrated "
                 "sampler");
  Rng rng(config.seed);
  RunResult result;
  result.state = init_naming_game_state(config, dataset, rng);
  result.trace.reserve(config.iterations);
  const double num_data = static_cast<double>(config.num_data);
  for (std::uint32_t i = 1; i <= config.iterations; ++i) {
    const ExchangeCounts counts =
        naming_game_iteration(result.state, config, dataset, rng);
    result.state.iteration = i;
    result.trace.push_back(make_record(result.state, dataset, i,
                                       counts.accepted_ab / num_data,
                                       counts.accepted_ba / num_data, true));
  }
  return result;
}

RunResult gibbs_integrated(const ModelConfig& config, const Dataset& dataset) {
  Rng rng(config.seed);
  RunResult result;
  result.state = init_gibbs_state(config, dataset, rng);
  result.trace.reserve(config.iterations);
  for (std::uint32_t i = 1; i <= config.iterations; ++i) {
    gibbs_sweep(result.state, config, dataset, rng);
    result.state.iteration = i;
    result.trace.push_back(
        make_record(result.state, dataset, i, kNaN, kNaN, false));
  }
  return result;
}

RunResult run_model(const ModelConfig& config, const Dataset& dataset) {
  if (config.communication == CommunicationType::IntegratedGibbs)
    return gibbs_integrated(config, dataset);
  return run_naming_game(config, dataset);
}

}  // namespace intermdm
