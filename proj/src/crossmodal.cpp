// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/crossmodal.hpp"

#include <cmath>
#include <limits>

#include "intermdm/error.hpp"
#include "intermdm/inference.hpp"
#include "intermdm/metrics.hpp"

namespace intermdm {

namespace {

void check_trained(const AgentState& agent) {
  for (const Simplex& row : agent.theta)
    for (double p : row)
      if (!std::isfinite(p)) throw_runtime("agent theta contains non-finite "
                                           "values; state is not trained");
  for (const auto& rows : agent.phi)
    for (const Simplex& row : rows)
      for (double p : row)
        if (!std::isfinite(p)) throw_runtime("agent phi contains non-finite "
                                             "values; state is not trained");
}

}  // namespace

SignInference infer_sign_from_observation(const AgentState& agent,
                                          const Observation& observation,
                                          const Simplex& gamma,
                                          CategoryPrior prior, Rng& rng) {
  check_trained(agent);
  if (agent.theta.empty()) throw_runtime("agent has no theta rows");
  const std::size_t num_categories = agent.theta.front().size();

  Simplex category_prior(num_categories, 1.0 / num_categories);
  if (prior == CategoryPrior::SignMarginalized) {
    if (gamma.size() != agent.theta.size())
      throw_runtime("infer_sign_from_observation: gamma/theta size mismatch");
    for (std::size_t l = 0; l < num_categories; ++l) {
      double acc = 0.0;
      for (std::size_t k = 0; k < agent.theta.size(); ++k)
        acc += gamma[k] * agent.theta[k][l];
      category_prior[l] = acc;
    }
  }

  SignInference out;
  const Simplex posterior =
      category_posterior(observation, category_prior, agent.phi);
  out.category = sample_categorical(posterior, rng);
  out.sign = propose_sign(out.category, agent.theta, gamma, rng);
  return out;
}

std::uint32_t sample_category_from_sign(const AgentState& agent,
                                        std::uint32_t sign, Rng& rng) {
  if (sign >= agent.theta.size())
    throw_runtime("sample_category_from_sign: sign index out of range");
  return sample_categorical(agent.theta[sign], rng);
}

Observation predict_observation_from_sign(const AgentState& agent,
                                          std::uint32_t sign,
                                          const std::vector<std::uint32_t>& totals,
                                          Rng& rng) {
  check_trained(agent);
  if (totals.size() != agent.phi.size())
    throw_runtime("predict_observation_from_sign: one total per modality "
                  "required");
  const std::uint32_t category = sample_category_from_sign(agent, sign, rng);

  Observation predicted;
  predicted.by_modality.resize(agent.phi.size());
  for (ModalityId m = 0; m < agent.phi.size(); ++m) {
    if (!agent.has_modality(m)) continue;
    predicted.by_modality[m] =
        sample_multinomial(totals[m], agent.phi[m][category], rng);
  }
  return predicted;
}

std::size_t nearest_dataset_image(const Observation& predicted,
                                  const std::vector<Observation>& candidates,
                                  ModalityId modality) {
  if (candidates.empty())
    throw_runtime("nearest_dataset_image: empty candidate set");
  if (!predicted.has(modality))
    throw_runtime("nearest_dataset_image: prediction lacks the modality");

  std::size_t best = 0;
  double best_jsd = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!candidates[i].has(modality))
      throw_runtime("nearest_dataset_image: candidate lacks the modality");
    const double d =
        jsd_histograms(predicted.at(modality), candidates[i].at(modality));
    if (d < best_jsd) {  // strict: ties keep the lowest index
      best_jsd = d;
      best = i;
    }
  }
  return best;
}

}  // namespace intermdm
