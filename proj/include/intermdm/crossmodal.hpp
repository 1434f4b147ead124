// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "intermdm/model.hpp"

namespace intermdm {

/// Category prior used when recognizing an observation without a known
/// sign. SignMarginalized mixes the theta rows by the sign prior
/// (sum_k gamma[k] * theta[k][l]); Uniform ignores the sign layer.
enum class CategoryPrior : std::uint8_t { SignMarginalized, Uniform };

struct SignInference {
  std::uint32_t category = 0;
  std::uint32_t sign = 0;
};

/// The speaker side of cross-modal inference: recognize a category from an
/// observation, then invert theta to utter a sign.
SignInference infer_sign_from_observation(const AgentState& agent,
                                          const Observation& observation,
                                          const Simplex& gamma,
                                          CategoryPrior prior, Rng& rng);

/// Draw the category a listener infers from a heard sign.
std::uint32_t sample_category_from_sign(const AgentState& agent,
                                        std::uint32_t sign, Rng& rng);

/// The listener side: imagine an observation for a heard sign. Draws a
/// category from theta[sign], then one histogram of the requested total per
/// modality the agent has. Never reads any real observation.
Observation predict_observation_from_sign(const AgentState& agent,
                                          std::uint32_t sign,
                                          const std::vector<std::uint32_t>& totals,
                                          Rng& rng);

/// Index of the candidate whose normalized histogram is JSD-closest to the
/// prediction in the given modality; ties go to the lowest index.
std::size_t nearest_dataset_image(const Observation& predicted,
                                  const std::vector<Observation>& candidates,
                                  ModalityId modality);

}  // namespace intermdm
