// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "intermdm/error.hpp"
#include "intermdm/model.hpp"
#include "intermdm/serialize.hpp"

using namespace intermdm;

namespace {

ModelConfig tiny_config() {
  ModelConfig config;
  config.num_signs = 3;
  config.num_categories = 2;
  config.num_data = 4;
  config.modalities = {"vision", "sound"};
  config.bins = {2, 3};
  config.beta = {0.001, 0.001};
  config.iterations = 5;
  config.seed = 11;
  return config;
}

Observation make_obs(std::optional<Histogram> vision,
                     std::optional<Histogram> sound) {
  Observation o;
  o.by_modality = {std::move(vision), std::move(sound)};
  return o;
}

std::vector<Observation> tiny_observations() {
  return {
      make_obs(Histogram{2, 1}, Histogram{1, 0, 0}),
      make_obs(Histogram{1, 0}, Histogram{0, 2, 0}),
      make_obs(Histogram{0, 3}, Histogram{0, 0, 1}),
      make_obs(Histogram{1, 1}, Histogram{1, 1, 1}),
  };
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("init_agent: shapes, priors and determinism") {
  const ModelConfig config = tiny_config();
  const auto obs = tiny_observations();
  Rng rng(config.seed);
  const AgentState agent = init_agent(config, obs, rng);

  CHECK(agent.has_modality(0));
  CHECK(agent.has_modality(1));
  REQUIRE(agent.phi[0].size() == 2);
  REQUIRE(agent.phi[1].size() == 2);
  CHECK(agent.phi[0][0].size() == 2);
  CHECK(agent.phi[1][1].size() == 3);
  REQUIRE(agent.theta.size() == 3);
  for (const Simplex& row : agent.theta) CHECK(is_valid_simplex(row));
  REQUIRE(agent.categories.size() == 4);
  for (std::uint32_t c : agent.categories) CHECK(c < 2);

  Rng rng2(config.seed);
  const AgentState again = init_agent(config, obs, rng2);
  CHECK(again.theta == agent.theta);
  CHECK(again.phi == agent.phi);
  CHECK(again.categories == agent.categories);
}

TEST_CASE("init_agent: empty run and single category") {
  ModelConfig config = tiny_config();
  Rng rng(0);
  CHECK_THROWS_AS(init_agent(config, {}, rng), Error);

  config.num_categories = 1;
  const auto obs = tiny_observations();
  const AgentState agent = init_agent(config, obs, rng);
  for (std::uint32_t c : agent.categories) CHECK(c == 0);
}

TEST_CASE("init_agent: missing modality never instantiates phi") {
  ModelConfig config = tiny_config();
  auto obs = tiny_observations();
  for (Observation& o : obs) o.by_modality[1].reset();
  Rng rng(1);
  const AgentState agent = init_agent(config, obs, rng);
  CHECK(agent.has_modality(0));
  CHECK_FALSE(agent.has_modality(1));
  CHECK(agent.phi[1].empty());
}

TEST_CASE("posterior_phi: conjugate counting") {
  const auto obs = tiny_observations();

  SUBCASE("no datum assigned keeps the prior") {
    const std::vector<std::uint32_t> c{1, 1, 1, 1};
    const DirichletParams p = posterior_phi(obs, c, 0, 0, 0.001, 2);
    CHECK(p == DirichletParams{0.001, 0.001});
  }
  SUBCASE("single datum adds its histogram") {
    const std::vector<std::uint32_t> c{0, 1, 1, 1};
    const DirichletParams p = posterior_phi(obs, c, 0, 0, 0.001, 2);
    CHECK(p[0] == doctest::Approx(2.001));
    CHECK(p[1] == doctest::Approx(1.001));
  }
  SUBCASE("two data sum") {
    // vision histograms [1,0] and [0,3] assigned to category 0
    const std::vector<std::uint32_t> c{1, 0, 0, 1};
    const DirichletParams p = posterior_phi(obs, c, 0, 0, 0.001, 2);
    CHECK(p[0] == doctest::Approx(1.001));
    CHECK(p[1] == doctest::Approx(3.001));
  }
  SUBCASE("absent modality is an error") {
    auto masked = obs;
    for (Observation& o : masked) o.by_modality[1].reset();
    const std::vector<std::uint32_t> c{0, 0, 0, 0};
    CHECK_THROWS_AS(posterior_phi(masked, c, 0, 1, 0.001, 3), Error);
  }
}

TEST_CASE("posterior_phi: updates are additive across splits") {
  const auto obs = tiny_observations();
  const std::vector<std::uint32_t> c{0, 0, 0, 0};
  const DirichletParams whole = posterior_phi(obs, c, 0, 1, 0.5, 3);

  const std::vector<Observation> first(obs.begin(), obs.begin() + 2);
  const std::vector<Observation> second(obs.begin() + 2, obs.end());
  const DirichletParams half =
      posterior_phi(first, {0, 0}, 0, 1, 0.5, 3);
  // Feed the intermediate posterior back in as the prior.
  DirichletParams chained = posterior_phi(second, {0, 0}, 0, 1, 0.0, 3);
  for (std::size_t v = 0; v < 3; ++v) chained[v] += half[v];
  for (std::size_t v = 0; v < 3; ++v)
    CHECK(chained[v] == doctest::Approx(whole[v]));
}

TEST_CASE("posterior_theta: counting oracle") {
  CHECK(posterior_theta({1, 1}, {0, 0}, 0, 0.01, 2) ==
        DirichletParams{0.01, 2.01});
  CHECK(posterior_theta({0, 1}, {1, 1}, 0, 0.25, 2) ==
        DirichletParams{0.25, 0.25});
  CHECK(posterior_theta({0, 1, 0}, {2, 2, 0}, 2, 0.5, 2) ==
        DirichletParams{1.5, 1.5});
}

TEST_CASE("category_posterior: hand-normalized examples") {
  SUBCASE("flat likelihood returns the prior") {
    Observation o = make_obs(Histogram{0, 0}, std::nullopt);
    const std::vector<std::vector<Simplex>> phi{
        {{0.9, 0.1}, {0.1, 0.9}}, {}};
    const Simplex post = category_posterior(o, {0.3, 0.7}, phi);
    CHECK(post[0] == doctest::Approx(0.3));
    CHECK(post[1] == doctest::Approx(0.7));
  }
  SUBCASE("single category") {
    Observation o = make_obs(Histogram{1, 2}, std::nullopt);
    const std::vector<std::vector<Simplex>> phi{{{0.5, 0.5}}, {}};
    CHECK(category_posterior(o, {1.0}, phi) == Simplex{1.0});
  }
  SUBCASE("two categories, one modality") {
    Observation o = make_obs(Histogram{1, 0}, std::nullopt);
    const std::vector<std::vector<Simplex>> phi{
        {{0.9, 0.1}, {0.1, 0.9}}, {}};
    const Simplex post = category_posterior(o, {0.5, 0.5}, phi);
    CHECK(post[0] == doctest::Approx(0.9));
    CHECK(post[1] == doctest::Approx(0.1));
  }
  SUBCASE("all-zero posterior is an error, not a renormalization") {
    Observation o = make_obs(Histogram{1, 0}, std::nullopt);
    const std::vector<std::vector<Simplex>> phi{
        {{0.0, 1.0}, {0.0, 1.0}}, {}};
    CHECK_THROWS_AS(category_posterior(o, {0.5, 0.5}, phi), Error);
  }
}

TEST_CASE("category_posterior: coefficient choice does not matter") {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    Observation o = make_obs(
        sample_multinomial(7, {0.2, 0.8}, rng),
        sample_multinomial(5, {0.3, 0.3, 0.4}, rng));
    std::vector<std::vector<Simplex>> phi(2);
    for (int l = 0; l < 3; ++l) {
      phi[0].push_back(sample_dirichlet({1.0, 1.0}, rng));
      phi[1].push_back(sample_dirichlet({1.0, 1.0, 1.0}, rng));
    }
    const Simplex prior = sample_dirichlet({1.0, 1.0, 1.0}, rng);
    const Simplex without = category_posterior(o, prior, phi);
    const Simplex with =
        category_posterior(o, prior, phi, LikelihoodTerm::WithCoefficient);
    for (std::size_t l = 0; l < 3; ++l)
      CHECK(without[l] == doctest::Approx(with[l]).epsilon(1e-9));
  }
}

TEST_CASE("category_posterior: dropping a modality flattens toward the prior") {
  Rng rng(43);
  Observation o = make_obs(sample_multinomial(20, {0.1, 0.9}, rng),
                           sample_multinomial(20, {0.7, 0.2, 0.1}, rng));
  std::vector<std::vector<Simplex>> phi(2);
  for (int l = 0; l < 2; ++l) {
    phi[0].push_back(sample_dirichlet({0.5, 0.5}, rng));
    phi[1].push_back(sample_dirichlet({0.5, 0.5, 0.5}, rng));
  }
  const Simplex prior{0.4, 0.6};
  const Simplex full = category_posterior(o, prior, phi);

  Observation dropped = o;
  dropped.by_modality[1].reset();
  const Simplex partial = category_posterior(dropped, prior, phi);
  CHECK(partial.size() == full.size());

  dropped.by_modality[0].reset();
  const Simplex none = category_posterior(dropped, prior, phi);
  CHECK(none[0] == doctest::Approx(prior[0]));
  CHECK(none[1] == doctest::Approx(prior[1]));
}

TEST_CASE("config and state serialization round-trips") {
  ModelConfig config = tiny_config();
  config.gamma = {0.2, 0.3, 0.5};
  const nlohmann::json j = model_config_to_json(config);
  CHECK(j.at("K") == 3);
  CHECK(j.at("communication_type") == "proposed");
  const ModelConfig back = model_config_from_json(j);
  CHECK(back.num_signs == config.num_signs);
  CHECK(back.bins == config.bins);
  CHECK(back.beta == config.beta);
  CHECK(back.gamma == config.gamma);
  CHECK(back.seed == config.seed);

  Rng rng(3);
  GameState state;
  state.agent_a = init_agent(config, tiny_observations(), rng);
  state.agent_b = init_agent(config, tiny_observations(), rng);
  state.signs_a = {0, 1, 2, 0};
  state.signs_b = {1, 1, 2, 0};
  state.iteration = 7;
  const nlohmann::json sj = game_state_to_json(state, config.modalities);
  const GameState back_state = game_state_from_json(sj, config.modalities);
  CHECK(back_state.agent_a.theta == state.agent_a.theta);
  CHECK(back_state.agent_b.phi == state.agent_b.phi);
  CHECK(back_state.signs_a == state.signs_a);
  CHECK(back_state.signs_b == state.signs_b);
  CHECK(back_state.iteration == 7);
}

TEST_SUITE_END();
