// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "intermdm/distributions.hpp"
#include "intermdm/rng.hpp"

namespace intermdm {

/// Modalities are indices into a run's fixed, non-empty name list
/// (e.g. {"vision", "sound", "haptic"}).
using ModalityId = std::size_t;

enum class CommunicationType : std::uint8_t {
  Proposed,        // M-H naming game
  AllAccept,       // forced z = 1
  AllReject,       // forced z = 0
  IntegratedGibbs  // joint sampler over both agents, single shared sign set
};

const char* to_string(CommunicationType type);
CommunicationType communication_type_from_string(const std::string& name);

/// One datum as seen by one agent: a histogram per modality the agent has.
struct Observation {
  std::vector<std::optional<Histogram>> by_modality;

  bool has(ModalityId m) const {
    return m < by_modality.size() && by_modality[m].has_value();
  }
  const Histogram& at(ModalityId m) const { return *by_modality[m]; }

  bool operator==(const Observation&) const = default;
};

struct ModelConfig {
  std::uint32_t num_signs = 15;       // K
  std::uint32_t num_categories = 15;  // L
  std::uint32_t num_data = 150;       // D
  std::vector<std::string> modalities = {"vision", "sound", "haptic"};
  std::vector<std::uint32_t> bins = {20, 20, 20};  // V per modality
  double alpha = 0.01;
  std::vector<double> beta = {0.001, 0.001, 0.001};  // per modality
  Simplex gamma;  // prior over signs; empty means uniform over K
  std::uint32_t iterations = 200;
  CommunicationType communication = CommunicationType::Proposed;
  std::uint64_t seed = 0;

  /// Effective sign prior: gamma if set, else uniform over num_signs.
  Simplex sign_prior() const;

  void validate() const;
};

/// One agent's side of the model: which modalities it has, its emission
/// rows phi[m][l] over the modality's bins, its sign-to-category rows
/// theta[k] over categories, and its current per-datum category assignments.
struct AgentState {
  std::vector<std::uint8_t> modality_present;
  std::vector<std::vector<Simplex>> phi;  // [modality][category] -> bins
  std::vector<Simplex> theta;             // [sign] -> categories
  std::vector<std::uint32_t> categories;  // size D, values < L

  bool has_modality(ModalityId m) const {
    return m < modality_present.size() && modality_present[m] != 0;
  }
};

/// Both agents plus each agent's copy of the sign assignments. The
/// integrated sampler keeps the two copies identical.
struct GameState {
  AgentState agent_a;
  AgentState agent_b;
  std::vector<std::uint32_t> signs_a;
  std::vector<std::uint32_t> signs_b;
  std::uint32_t iteration = 0;
};

/// Which likelihood variant the category posterior multiplies in. The
/// coefficient depends only on the observed counts, so both give the same
/// normalized posterior; coefficient-free is the default everywhere.
enum class LikelihoodTerm : std::uint8_t { CoefficientFree, WithCoefficient };

/// Draw an agent from the priors: phi rows from Dir(beta), theta rows from
/// Dir(alpha), categories uniform. Observations fix which modalities exist.
AgentState init_agent(const ModelConfig& config,
                      const std::vector<Observation>& observations, Rng& rng);

/// Conjugate update for one emission row: beta + sum of histograms of the
/// data currently assigned to `category`, for one modality.
DirichletParams posterior_phi(const std::vector<Observation>& observations,
                              const std::vector<std::uint32_t>& categories,
                              std::uint32_t category, ModalityId modality,
                              double beta, std::uint32_t bins);

/// Conjugate update for one theta row: entry l is
/// alpha + #{d : signs[d] == sign && categories[d] == l}.
DirichletParams posterior_theta(const std::vector<std::uint32_t>& categories,
                                const std::vector<std::uint32_t>& signs,
                                std::uint32_t sign, double alpha,
                                std::uint32_t num_categories);

/// Normalized posterior over categories for one datum, computed in log
/// space with a max shift: prior[l] times the product of per-modality
/// multinomial likelihoods. Modalities absent from the observation simply
/// contribute nothing. Throws if every category has zero posterior mass.
Simplex category_posterior(const Observation& observation,
                           const Simplex& category_prior,
                           const std::vector<std::vector<Simplex>>& phi,
                           LikelihoodTerm term = LikelihoodTerm::CoefficientFree);

}  // namespace intermdm
