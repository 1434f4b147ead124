// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "intermdm/model.hpp"
#include "intermdm/rng.hpp"

namespace intermdm {

/// Paired observation sets for both agents plus ground-truth object labels.
struct Dataset {
  std::vector<std::string> modalities;
  std::vector<std::uint32_t> bins;  // V per modality
  std::vector<Observation> observations_a;
  std::vector<Observation> observations_b;
  std::vector<std::uint32_t> true_labels;
  nlohmann::json meta = nlohmann::json::object();

  std::uint32_t size() const {
    return static_cast<std::uint32_t>(true_labels.size());
  }
};

/// Generator knobs. Per modality, objects fall into groups_per_modality
/// groups that share one emission signature; the groupings are drawn
/// independently per modality, and no two objects may share their group in
/// every modality. One modality alone therefore resolves the data only up
/// to its groups (a structural accuracy ceiling), while all modalities
/// together identify every object. Each object also perturbs its group
/// signature by a small object-specific component (within_group_weight), so
/// an agent guided by shared signs can tell group members apart even
/// through a single modality. An object's emission distribution is
/// (1 - signature_weight) * shared_base + signature_weight *
/// ((1 - within_group_weight) * group_sig + within_group_weight * own_sig).
/// groups_per_modality = 0 gives every object its own signature.
struct SyntheticSpec {
  std::uint32_t num_objects = 15;
  std::uint32_t per_object = 10;
  std::vector<std::string> modalities = {"vision", "sound", "haptic"};
  std::vector<std::uint32_t> bins = {20, 20, 20};
  std::vector<std::uint32_t> totals = {100, 100, 100};  // histogram sum
  std::uint32_t groups_per_modality = 4;
  double base_concentration = 2.0;       // shared base ~ Dir(this)
  double signature_concentration = 0.3;  // signature ~ Dir(this)
  double signature_weight = 0.5;
  double within_group_weight = 0.25;
  double min_signature_jsd = 0.35;  // resample signatures closer than this

  void validate() const;
};

/// Which modalities each agent keeps. Conditions 2-4 follow the fixed
/// three-modality masking table; condition 1 keeps everything.
struct ConditionSpec {
  int condition = 1;
  std::string pattern = "-";  // "-", "I", "II" or "III"
  std::vector<std::uint8_t> keep_a;
  std::vector<std::uint8_t> keep_b;

  static ConditionSpec make(int condition, const std::string& pattern,
                            std::size_t num_modalities);
};

/// Draw per-object emission distributions and then one multinomial
/// histogram per datum per agent per modality. Both agents see the same
/// objects; their observations differ only by sampling noise.
Dataset generate_synthetic(const SyntheticSpec& spec, Rng& rng);

/// Remove masked modalities from each agent's observations. Labels are
/// untouched. Idempotent; masking all modalities of an agent is an error.
Dataset apply_condition(const Dataset& dataset, const ConditionSpec& spec);

/// Load a dataset from the documented JSON schema, with positional
/// diagnostics on violation.
Dataset load_histogram_dataset(const std::string& path);

void save_dataset(const Dataset& dataset, const std::string& path);

nlohmann::json dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(const nlohmann::json& j);

}  // namespace intermdm
