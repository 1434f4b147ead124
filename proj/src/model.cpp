// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/model.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "intermdm/error.hpp"

namespace intermdm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

const char* to_string(CommunicationType type) {
  switch (type) {
    case CommunicationType::Proposed: return "proposed";
    case CommunicationType::AllAccept: return "all_accept";
    case CommunicationType::AllReject: return "all_reject";
    case CommunicationType::IntegratedGibbs: return "integrated_gibbs";
  }
  return "unknown";
}

CommunicationType communication_type_from_string(const std::string& name) {
  if (name == "proposed") return CommunicationType::Proposed;
  if (name == "all_accept") return CommunicationType::AllAccept;
  if (name == "all_reject") return CommunicationType::AllReject;
  if (name == "integrated_gibbs") return CommunicationType::IntegratedGibbs;
  throw_config("unknown communication_type '" + name +
               "' (expected proposed|all_accept|all_reject|integrated_gibbs)");
}

Simplex ModelConfig::sign_prior() const {
  if (!gamma.empty()) return gamma;
  return Simplex(num_signs, 1.0 / static_cast<double>(num_signs));
}

void ModelConfig::validate() const {
  if (num_signs < 1 || num_categories < 1 || num_data < 1)
    throw_config("K, L and D must all be >= 1");
  if (modalities.empty()) throw_config("modality list must be non-empty");
  if (bins.size() != modalities.size())
    throw_config("bins must list one entry per modality");
  for (std::uint32_t v : bins)
    if (v < 1) throw_config("per-modality bin count must be >= 1");
  if (!(alpha > 0.0)) throw_config("alpha must be > 0");
  if (beta.size() != modalities.size())
    throw_config("beta must list one entry per modality");
  for (double b : beta)
    if (!(b > 0.0)) throw_config("beta entries must be > 0");
  if (!gamma.empty()) {
    if (gamma.size() != num_signs)
      throw_config("gamma must have K entries");
    if (!is_valid_simplex(gamma))
      throw_config("gamma must be a probability simplex");
  }
}

namespace {

void check_observations(const ModelConfig& config,
                        const std::vector<Observation>& observations) {
  if (observations.size() != config.num_data)
    throw_config("observation count does not match D");
  if (observations.empty()) throw_config("empty observation set");
  const Observation& first = observations.front();
  bool any = false;
  for (ModalityId m = 0; m < config.modalities.size(); ++m) {
    const bool present = first.has(m);
    any = any || present;
    for (const Observation& o : observations) {
      if (o.has(m) != present)
        throw_config("modality presence must be identical across data "
                     "within one agent");
      if (present && o.at(m).size() != config.bins[m])
        throw_config("histogram length does not match bins for modality '" +
                     config.modalities[m] + "'");
    }
  }
  if (!any) throw_config("agent must have at least one modality");
}

}  // namespace

AgentState init_agent(const ModelConfig& config,
                      const std::vector<Observation>& observations, Rng& rng) {
  config.validate();
  check_observations(config, observations);

  const std::size_t num_modalities = config.modalities.size();
  AgentState agent;
  agent.modality_present.assign(num_modalities, 0);
  agent.phi.assign(num_modalities, {});

  for (ModalityId m = 0; m < num_modalities; ++m) {
    if (!observations.front().has(m)) continue;
    agent.modality_present[m] = 1;
    agent.phi[m].reserve(config.num_categories);
    const DirichletParams prior(config.bins[m], config.beta[m]);
    for (std::uint32_t l = 0; l < config.num_categories; ++l)
      agent.phi[m].push_back(sample_dirichlet(prior, rng));
  }

  const DirichletParams theta_prior(config.num_categories, config.alpha);
  agent.theta.reserve(config.num_signs);
  for (std::uint32_t k = 0; k < config.num_signs; ++k)
    agent.theta.push_back(sample_dirichlet(theta_prior, rng));

  agent.categories.resize(config.num_data);
  for (std::uint32_t& c : agent.categories)
    c = static_cast<std::uint32_t>(rng.uniform_below(config.num_categories));
  return agent;
}

DirichletParams posterior_phi(const std::vector<Observation>& observations,
                              const std::vector<std::uint32_t>& categories,
                              std::uint32_t category, ModalityId modality,
                              double beta, std::uint32_t bins) {
  if (observations.size() != categories.size())
    throw_runtime("posterior_phi: observations/categories length mismatch");
  if (!observations.empty() && !observations.front().has(modality))
    throw_runtime("posterior_phi: modality absent for this agent");

  DirichletParams params(bins, beta);
  for (std::size_t d = 0; d < observations.size(); ++d) {
    if (categories[d] != category) continue;
    const Histogram& h = observations[d].at(modality);
    if (h.size() != bins)
      throw_runtime("posterior_phi: histogram length mismatch");
    for (std::size_t v = 0; v < bins; ++v)
      params[v] += static_cast<double>(h[v]);
  }
  return params;
}

DirichletParams posterior_theta(const std::vector<std::uint32_t>& categories,
                                const std::vector<std::uint32_t>& signs,
                                std::uint32_t sign, double alpha,
                                std::uint32_t num_categories) {
  if (categories.size() != signs.size())
    throw_runtime("posterior_theta: categories/signs length mismatch");
  DirichletParams params(num_categories, alpha);
  for (std::size_t d = 0; d < categories.size(); ++d) {
    if (signs[d] != sign) continue;
    if (categories[d] >= num_categories)
      throw_runtime("posterior_theta: category index out of range");
    params[categories[d]] += 1.0;
  }
  return params;
}

Simplex category_posterior(const Observation& observation,
                           const Simplex& category_prior,
                           const std::vector<std::vector<Simplex>>& phi,
                           LikelihoodTerm term) {
  const std::size_t num_categories = category_prior.size();
  if (num_categories == 0)
    throw_runtime("category_posterior: empty category prior");

  std::vector<double> log_score(num_categories);
  for (std::size_t l = 0; l < num_categories; ++l)
    log_score[l] =
        category_prior[l] > 0.0 ? std::log(category_prior[l]) : kNegInf;

  for (ModalityId m = 0; m < observation.by_modality.size(); ++m) {
    if (!observation.has(m)) continue;
    if (m >= phi.size() || phi[m].size() != num_categories)
      throw_runtime("category_posterior: phi rows do not cover modality");
    const Histogram& h = observation.at(m);
    for (std::size_t l = 0; l < num_categories; ++l) {
      log_score[l] += term == LikelihoodTerm::WithCoefficient
                          ? multinomial_log_pmf(h, phi[m][l])
                          : multinomial_log_pmf_nocoeff(h, phi[m][l]);
    }
  }

  double max_log = kNegInf;
  for (double s : log_score)
    if (s > max_log) max_log = s;
  if (!std::isfinite(max_log))
    throw_runtime("category_posterior: zero posterior mass in every category");

  Simplex posterior(num_categories);
  double sum = 0.0;
  for (std::size_t l = 0; l < num_categories; ++l) {
    posterior[l] = std::exp(log_score[l] - max_log);
    sum += posterior[l];
  }
  for (double& p : posterior) p /= sum;
  assert(is_valid_simplex(posterior));
  return posterior;
}

}  // namespace intermdm
