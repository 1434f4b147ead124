// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/synthdata.hpp"

#include <fstream>
#include <set>

#include "intermdm/error.hpp"
#include "intermdm/metrics.hpp"

namespace intermdm {

void SyntheticSpec::validate() const {
  if (num_objects < 1 || per_object < 1)
    throw_config("num_objects and per_object must be >= 1");
  if (modalities.empty()) throw_config("modality list must be non-empty");
  if (bins.size() != modalities.size() || totals.size() != modalities.size())
    throw_config("bins and totals must list one entry per modality");
  for (std::uint32_t v : bins)
    if (v < 1) throw_config("bins must be >= 1");
  for (std::uint32_t t : totals)
    if (t < 1) throw_config("histogram totals must be >= 1");
  if (!(base_concentration > 0.0) || !(signature_concentration > 0.0))
    throw_config("concentrations must be > 0");
  if (!(signature_weight >= 0.0) || !(signature_weight <= 1.0))
    throw_config("signature_weight must lie in [0, 1]");
  if (!(within_group_weight >= 0.0) || !(within_group_weight <= 1.0))
    throw_config("within_group_weight must lie in [0, 1]");
  if (!(min_signature_jsd >= 0.0))
    throw_config("min_signature_jsd must be >= 0");
}

namespace {

// Object signatures per modality, resampled until all pairs are at least
// min_jsd apart so no two objects share a modality profile outright.
std::vector<Simplex> draw_signatures(std::uint32_t num_objects,
                                     std::uint32_t bins, double concentration,
                                     double min_jsd, Rng& rng) {
  const DirichletParams prior(bins, concentration);
  std::vector<Simplex> signatures;
  signatures.reserve(num_objects);
  int attempts = 0;
  while (signatures.size() < num_objects) {
    if (++attempts > 20000)
      throw_runtime("generate_synthetic: could not place object signatures "
                    "with the requested separation");
    Simplex candidate = sample_dirichlet(prior, rng);
    bool ok = true;
    for (const Simplex& s : signatures) {
      if (jsd(candidate, s) < min_jsd) {
        ok = false;
        break;
      }
    }
    if (ok) signatures.push_back(std::move(candidate));
  }
  return signatures;
}

}  // namespace

namespace {

// Balanced random assignment of objects to groups.
std::vector<std::uint32_t> draw_grouping(std::uint32_t num_objects,
                                         std::uint32_t num_groups, Rng& rng) {
  std::vector<std::uint32_t> assignment(num_objects);
  for (std::uint32_t i = 0; i < num_objects; ++i)
    assignment[i] = i % num_groups;
  for (std::size_t i = assignment.size(); i > 1; --i)
    std::swap(assignment[i - 1], assignment[rng.uniform_below(i)]);
  return assignment;
}

// No two objects may share their group in every modality, otherwise they
// would be indistinguishable even with all modalities present.
bool has_full_collision(
    const std::vector<std::vector<std::uint32_t>>& groupings,
    std::uint32_t num_objects) {
  for (std::uint32_t i = 0; i < num_objects; ++i)
    for (std::uint32_t j = i + 1; j < num_objects; ++j) {
      bool all_equal = true;
      for (const auto& g : groupings)
        all_equal = all_equal && g[i] == g[j];
      if (all_equal) return true;
    }
  return false;
}

}  // namespace

Dataset generate_synthetic(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t num_modalities = spec.modalities.size();
  const std::uint32_t groups =
      spec.groups_per_modality == 0 ||
              spec.groups_per_modality >= spec.num_objects
          ? spec.num_objects
          : spec.groups_per_modality;

  std::vector<std::vector<std::uint32_t>> groupings(num_modalities);
  if (groups == spec.num_objects || num_modalities == 1) {
    for (auto& g : groupings) {
      g.resize(spec.num_objects);
      for (std::uint32_t i = 0; i < spec.num_objects; ++i) g[i] = i;
    }
    if (groups < spec.num_objects)
      groupings[0] = draw_grouping(spec.num_objects, groups, rng);
  } else {
    int attempts = 0;
    do {
      if (++attempts > 1000)
        throw_runtime("generate_synthetic: could not draw collision-free "
                      "group assignments");
      for (auto& g : groupings)
        g = draw_grouping(spec.num_objects, groups, rng);
    } while (has_full_collision(groupings, spec.num_objects));
  }

  // Ground-truth emission simplices per (modality, object).
  const double own_weight =
      groups == spec.num_objects ? 0.0 : spec.within_group_weight;
  std::vector<std::vector<Simplex>> emissions(num_modalities);
  for (ModalityId m = 0; m < num_modalities; ++m) {
    const DirichletParams base_prior(spec.bins[m], spec.base_concentration);
    const Simplex base = sample_dirichlet(base_prior, rng);
    std::vector<Simplex> signatures =
        draw_signatures(groups, spec.bins[m], spec.signature_concentration,
                        spec.min_signature_jsd, rng);
    const DirichletParams own_prior(spec.bins[m],
                                    spec.signature_concentration);
    emissions[m].resize(spec.num_objects);
    for (std::uint32_t obj = 0; obj < spec.num_objects; ++obj) {
      const Simplex& group_sig = signatures[groupings[m][obj]];
      const Simplex own_sig =
          own_weight > 0.0 ? sample_dirichlet(own_prior, rng) : Simplex();
      Simplex p(spec.bins[m]);
      for (std::size_t v = 0; v < p.size(); ++v) {
        const double sig = own_weight > 0.0
                               ? (1.0 - own_weight) * group_sig[v] +
                                     own_weight * own_sig[v]
                               : group_sig[v];
        p[v] = (1.0 - spec.signature_weight) * base[v] +
               spec.signature_weight * sig;
      }
      emissions[m][obj] = std::move(p);
    }
  }

  Dataset dataset;
  dataset.modalities = spec.modalities;
  dataset.bins = spec.bins;
  const std::uint32_t num_data = spec.num_objects * spec.per_object;
  dataset.true_labels.reserve(num_data);
  dataset.observations_a.reserve(num_data);
  dataset.observations_b.reserve(num_data);

  for (std::uint32_t obj = 0; obj < spec.num_objects; ++obj) {
    for (std::uint32_t rep = 0; rep < spec.per_object; ++rep) {
      dataset.true_labels.push_back(obj);
      Observation oa;
      Observation ob;
      oa.by_modality.resize(num_modalities);
      ob.by_modality.resize(num_modalities);
      for (ModalityId m = 0; m < num_modalities; ++m) {
        oa.by_modality[m] =
            sample_multinomial(spec.totals[m], emissions[m][obj], rng);
        ob.by_modality[m] =
            sample_multinomial(spec.totals[m], emissions[m][obj], rng);
      }
      dataset.observations_a.push_back(std::move(oa));
      dataset.observations_b.push_back(std::move(ob));
    }
  }

  dataset.meta = {
      {"generator", "synthetic"},
      {"num_objects", spec.num_objects},
      {"per_object", spec.per_object},
      {"totals", spec.totals},
      {"groups_per_modality", spec.groups_per_modality},
      {"base_concentration", spec.base_concentration},
      {"signature_concentration", spec.signature_concentration},
      {"signature_weight", spec.signature_weight},
      {"within_group_weight", spec.within_group_weight},
      {"min_signature_jsd", spec.min_signature_jsd},
  };
  nlohmann::json grouping_json = nlohmann::json::object();
  for (ModalityId m = 0; m < num_modalities; ++m)
    grouping_json[spec.modalities[m]] = groupings[m];
  dataset.meta["groupings"] = std::move(grouping_json);
  // Ground-truth emission rows, keyed by modality name; diagnostics and
  // generator-convergence checks read these back.
  nlohmann::json truth = nlohmann::json::object();
  for (ModalityId m = 0; m < num_modalities; ++m)
    truth[spec.modalities[m]] = emissions[m];
  dataset.meta["emissions"] = std::move(truth);
  return dataset;
}

ConditionSpec ConditionSpec::make(int condition, const std::string& pattern,
                                  std::size_t num_modalities) {
  ConditionSpec spec;
  spec.condition = condition;
  spec.pattern = pattern;
  spec.keep_a.assign(num_modalities, 1);
  spec.keep_b.assign(num_modalities, 1);
  if (condition == 1) {
    spec.pattern = "-";
    return spec;
  }
  if (condition < 1 || condition > 4)
    throw_config("condition must be 1..4");
  if (num_modalities != 3)
    throw_config("conditions 2-4 are defined for exactly three modalities");

  int p = 0;
  if (pattern == "I") p = 0;
  else if (pattern == "II") p = 1;
  else if (pattern == "III") p = 2;
  else throw_config("pattern must be I, II or III for conditions 2-4");

  // Masking table, indexed [pattern][modality] with modalities in dataset
  // order (vision, sound, haptic).
  static constexpr std::uint8_t kCond2B[3][3] = {
      {1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
  static constexpr std::uint8_t kCond3B[3][3] = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  static constexpr std::uint8_t kCond4A[3][3] = {
      {1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
  static constexpr std::uint8_t kCond4B[3][3] = {
      {0, 0, 1}, {1, 0, 0}, {0, 1, 0}};

  for (std::size_t m = 0; m < 3; ++m) {
    switch (condition) {
      case 2: spec.keep_b[m] = kCond2B[p][m]; break;
      case 3: spec.keep_b[m] = kCond3B[p][m]; break;
      case 4:
        spec.keep_a[m] = kCond4A[p][m];
        spec.keep_b[m] = kCond4B[p][m];
        break;
      default: break;
    }
  }
  return spec;
}

namespace {

std::vector<Observation> mask_observations(
    const std::vector<Observation>& observations,
    const std::vector<std::uint8_t>& keep, const char* agent) {
  bool any = false;
  for (std::uint8_t k : keep) any = any || k != 0;
  if (!any)
    throw_config(std::string("apply_condition: agent ") + agent +
                 " would lose every modality");
  std::vector<Observation> out = observations;
  for (Observation& o : out) {
    for (std::size_t m = 0; m < o.by_modality.size(); ++m)
      if (m < keep.size() && keep[m] == 0) o.by_modality[m].reset();
  }
  return out;
}

}  // namespace

Dataset apply_condition(const Dataset& dataset, const ConditionSpec& spec) {
  if (spec.keep_a.size() != dataset.modalities.size() ||
      spec.keep_b.size() != dataset.modalities.size())
    throw_config("apply_condition: mask length does not match modalities");
  Dataset out = dataset;
  out.observations_a = mask_observations(dataset.observations_a, spec.keep_a, "A");
  out.observations_b = mask_observations(dataset.observations_b, spec.keep_b, "B");
  out.meta["condition"] = spec.condition;
  out.meta["pattern"] = spec.pattern;
  return out;
}

namespace {

Histogram histogram_from_json(const nlohmann::json& j, const std::string& at,
                              std::uint32_t bins) {
  if (!j.is_array())
    throw_config(at + ": expected an array of counts");
  if (j.size() != bins)
    throw_config(at + ": expected " + std::to_string(bins) + " bins, got " +
                 std::to_string(j.size()));
  Histogram h;
  h.reserve(j.size());
  for (std::size_t v = 0; v < j.size(); ++v) {
    const auto& e = j[v];
    if (!e.is_number_integer() || e.get<long long>() < 0)
      throw_config(at + "[" + std::to_string(v) +
                   "]: counts must be non-negative integers");
    h.push_back(e.get<std::uint32_t>());
  }
  return h;
}

std::vector<Observation> observations_from_json(
    const nlohmann::json& j, const std::string& field,
    const std::vector<std::string>& modalities,
    const std::vector<std::uint32_t>& bins, std::size_t expected_size) {
  if (!j.is_array())
    throw_config(field + ": expected an array");
  if (j.size() != expected_size)
    throw_config(field + ": expected " + std::to_string(expected_size) +
                 " observations, got " + std::to_string(j.size()));
  std::vector<Observation> out;
  out.reserve(j.size());
  for (std::size_t d = 0; d < j.size(); ++d) {
    const std::string at = field + "[" + std::to_string(d) + "]";
    const auto& row = j[d];
    if (!row.is_object())
      throw_config(at + ": expected an object keyed by modality");
    Observation o;
    o.by_modality.resize(modalities.size());
    for (auto it = row.begin(); it != row.end(); ++it) {
      auto pos = std::find(modalities.begin(), modalities.end(), it.key());
      if (pos == modalities.end())
        throw_config(at + "." + it.key() + ": unknown modality");
      const std::size_t m =
          static_cast<std::size_t>(pos - modalities.begin());
      o.by_modality[m] =
          histogram_from_json(it.value(), at + "." + it.key(), bins[m]);
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

nlohmann::json dataset_to_json(const Dataset& dataset) {
  nlohmann::json j;
  j["schema"] = "intermdm-dataset-v1";
  j["modalities"] = dataset.modalities;
  nlohmann::json v = nlohmann::json::object();
  for (std::size_t m = 0; m < dataset.modalities.size(); ++m)
    v[dataset.modalities[m]] = dataset.bins[m];
  j["V"] = v;
  j["D"] = dataset.size();
  j["true_labels"] = dataset.true_labels;
  auto dump_observations = [&](const std::vector<Observation>& obs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Observation& o : obs) {
      nlohmann::json row = nlohmann::json::object();
      for (std::size_t m = 0; m < dataset.modalities.size(); ++m)
        if (o.has(m)) row[dataset.modalities[m]] = o.at(m);
      arr.push_back(std::move(row));
    }
    return arr;
  };
  j["observations_a"] = dump_observations(dataset.observations_a);
  j["observations_b"] = dump_observations(dataset.observations_b);
  j["meta"] = dataset.meta;
  return j;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw_config("dataset: expected a JSON object");
  for (const char* key :
       {"modalities", "V", "D", "true_labels", "observations_a",
        "observations_b"})
    if (!j.contains(key))
      throw_config(std::string("dataset: missing field '") + key + "'");

  Dataset dataset;
  dataset.modalities = j["modalities"].get<std::vector<std::string>>();
  if (dataset.modalities.empty())
    throw_config("modalities: must be non-empty");
  {
    std::set<std::string> distinct(dataset.modalities.begin(),
                                   dataset.modalities.end());
    if (distinct.size() != dataset.modalities.size())
      throw_config("modalities: names must be distinct");
  }

  const auto& v = j["V"];
  if (!v.is_object()) throw_config("V: expected an object keyed by modality");
  dataset.bins.resize(dataset.modalities.size());
  for (std::size_t m = 0; m < dataset.modalities.size(); ++m) {
    const std::string& name = dataset.modalities[m];
    if (!v.contains(name))
      throw_config("V: missing bin count for modality '" + name + "'");
    if (!v[name].is_number_integer() || v[name].get<long long>() < 1)
      throw_config("V." + name + ": bin count must be a positive integer");
    dataset.bins[m] = v[name].get<std::uint32_t>();
  }

  if (!j["D"].is_number_integer() || j["D"].get<long long>() < 1)
    throw_config("D: must be a positive integer");
  const std::size_t num_data = j["D"].get<std::size_t>();

  const auto& labels = j["true_labels"];
  if (!labels.is_array() || labels.size() != num_data)
    throw_config("true_labels: expected " + std::to_string(num_data) +
                 " entries");
  dataset.true_labels.reserve(num_data);
  for (std::size_t d = 0; d < labels.size(); ++d) {
    if (!labels[d].is_number_integer() || labels[d].get<long long>() < 0)
      throw_config("true_labels[" + std::to_string(d) +
                   "]: must be a non-negative integer");
    dataset.true_labels.push_back(labels[d].get<std::uint32_t>());
  }

  dataset.observations_a =
      observations_from_json(j["observations_a"], "observations_a",
                             dataset.modalities, dataset.bins, num_data);
  dataset.observations_b =
      observations_from_json(j["observations_b"], "observations_b",
                             dataset.modalities, dataset.bins, num_data);
  if (j.contains("meta")) dataset.meta = j["meta"];

  // Each agent needs a consistent, non-empty presence pattern.
  for (const char* name : {"a", "b"}) {
    const auto& obs =
        name[0] == 'a' ? dataset.observations_a : dataset.observations_b;
    bool any = false;
    for (std::size_t m = 0; m < dataset.modalities.size(); ++m) {
      const bool present = obs.front().has(m);
      any = any || present;
      for (std::size_t d = 0; d < obs.size(); ++d)
        if (obs[d].has(m) != present)
          throw_config("observations_" + std::string(name) + "[" +
                       std::to_string(d) + "]: modality '" +
                       dataset.modalities[m] +
                       "' presence differs from the rest of the agent");
    }
    if (!any)
      throw_config("observations_" + std::string(name) +
                   ": agent has no modalities");
  }
  return dataset;
}

Dataset load_histogram_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open dataset file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_config("dataset '" + path + "': " + e.what());
  }
  return dataset_from_json(j);
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw_runtime("cannot write dataset file: " + path);
  out << dataset_to_json(dataset).dump(2) << "\n";
}

}  // namespace intermdm
