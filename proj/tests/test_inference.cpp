// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "intermdm/error.hpp"
#include "intermdm/inference.hpp"
#include "intermdm/metrics.hpp"

using namespace intermdm;

namespace {

SyntheticSpec small_synth() {
  SyntheticSpec spec;
  spec.num_objects = 5;
  spec.per_object = 6;
  spec.bins = {12, 12, 12};
  spec.totals = {60, 60, 60};
  spec.groups_per_modality = 0;  // one signature per object
  return spec;
}

ModelConfig small_config(const Dataset& dataset, CommunicationType comm,
                         std::uint64_t seed) {
  ModelConfig config;
  config.num_signs = 5;
  config.num_categories = 5;
  config.num_data = dataset.size();
  config.modalities = dataset.modalities;
  config.bins = dataset.bins;
  config.beta = {0.001, 0.001, 0.001};
  config.iterations = 40;
  config.communication = comm;
  config.seed = seed;
  return config;
}

// Frozen toy for acceptance-rate checks: one modality, two bins. The
// speaker's theta is an identity map so its proposal is deterministic.
struct Toy {
  ModelConfig config;
  Dataset dataset;
  GameState state;
};

Toy make_toy() {
  Toy toy;
  toy.config.num_signs = 2;
  toy.config.num_categories = 2;
  toy.config.num_data = 4;
  toy.config.modalities = {"vision"};
  toy.config.bins = {2};
  toy.config.beta = {0.1};
  toy.config.alpha = 0.1;
  toy.config.iterations = 1;
  toy.config.seed = 7;

  toy.dataset.modalities = {"vision"};
  toy.dataset.bins = {2};
  toy.dataset.true_labels = {0, 1, 0, 1};
  for (int d = 0; d < 4; ++d) {
    Observation o;
    o.by_modality = {Histogram{1, 1}};
    toy.dataset.observations_a.push_back(o);
    toy.dataset.observations_b.push_back(o);
  }

  AgentState speaker;
  speaker.modality_present = {1};
  speaker.phi = {{{0.5, 0.5}, {0.5, 0.5}}};
  speaker.theta = {{1.0, 0.0}, {0.0, 1.0}};  // propose k = c deterministically
  speaker.categories = {1, 0, 0, 0};

  AgentState listener;
  listener.modality_present = {1};
  listener.phi = {{{0.5, 0.5}, {0.5, 0.5}}};
  listener.theta = {{0.8, 0.2}, {0.3, 0.7}};
  listener.categories = {0, 1, 0, 1};

  // Per-datum acceptance targets: 0.3/0.8, 1 (same sign), clipped 1, 0.2/0.7.
  toy.state.agent_a = speaker;
  toy.state.agent_b = listener;
  toy.state.signs_a = {0, 0, 0, 0};
  toy.state.signs_b = {0, 0, 1, 1};
  return toy;
}

}  // namespace

TEST_SUITE_BEGIN("inference");

TEST_CASE("propose_sign: degenerate and deterministic cases") {
  Rng rng(1);
  CHECK(propose_sign(0, {{0.3, 0.7}}, {1.0}, rng) == 0);  // K = 1

  // Identity-like theta: theta[k][c] = 1 iff k == c.
  const std::vector<Simplex> identity{
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const Simplex gamma(3, 1.0 / 3.0);
  for (int i = 0; i < 50; ++i)
    CHECK(propose_sign(2, identity, gamma, rng) == 2);

  const std::vector<Simplex> dead{{0.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(propose_sign(0, dead, {0.5, 0.5}, rng), Error);
}

TEST_CASE("propose_sign: inversion frequencies") {
  // P(0) = 0.9 / (0.9 + 0.3) = 0.75 under a uniform sign prior.
  const std::vector<Simplex> theta{{0.9, 0.1}, {0.3, 0.7}};
  const Simplex gamma{0.5, 0.5};
  Rng rng(2);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    zeros += propose_sign(0, theta, gamma, rng) == 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(zeros) / n - 0.75) < 0.01);
}

TEST_CASE("acceptance_ratio: worked examples") {
  const std::vector<Simplex> theta{{0.2, 0.8}, {0.9, 0.1}};
  CHECK(acceptance_ratio(0, theta, 1, 1) == doctest::Approx(1.0));
  CHECK(acceptance_ratio(0, theta, 0, 1) ==
        doctest::Approx(0.2 / 0.9).epsilon(1e-9));
  CHECK(acceptance_ratio(0, theta, 1, 0) == doctest::Approx(1.0));  // clipped

  const std::vector<Simplex> with_zero{{0.0, 1.0}, {0.5, 0.5}};
  CHECK(acceptance_ratio(0, with_zero, 1, 0) == doctest::Approx(1.0));
}

TEST_CASE("mh_exchange: forced modes") {
  Toy toy = make_toy();

  SUBCASE("all-reject never touches the signs") {
    toy.config.communication = CommunicationType::AllReject;
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      GameState state = toy.state;
      const auto signs_before = state.signs_b;
      const auto flags = mh_exchange(state.agent_a, state.agent_b,
                                     toy.dataset.observations_b,
                                     state.signs_b, toy.config, rng);
      CHECK(state.signs_b == signs_before);
      for (std::uint8_t f : flags) CHECK(f == 0);
    }
  }
  SUBCASE("all-accept adopts every proposal") {
    toy.config.communication = CommunicationType::AllAccept;
    Rng rng(4);
    GameState state = toy.state;
    const auto flags =
        mh_exchange(state.agent_a, state.agent_b,
                    toy.dataset.observations_b, state.signs_b, toy.config, rng);
    for (std::uint8_t f : flags) CHECK(f == 1);
    // The speaker's theta is an identity map, so the adopted signs are the
    // speaker's categories.
    CHECK(state.signs_b == std::vector<std::uint32_t>{1, 0, 0, 0});
  }
}

TEST_CASE("mh_exchange: speaker is read-only, listener is redrawn") {
  Toy toy = make_toy();
  toy.config.communication = CommunicationType::Proposed;
  Rng rng(5);
  GameState state = toy.state;
  const AgentState speaker_before = state.agent_a;
  mh_exchange(state.agent_a, state.agent_b, toy.dataset.observations_b,
              state.signs_b, toy.config, rng);
  CHECK(state.agent_a.theta == speaker_before.theta);
  CHECK(state.agent_a.phi == speaker_before.phi);
  CHECK(state.agent_a.categories == speaker_before.categories);
  CHECK(state.signs_a == toy.state.signs_a);
}

TEST_CASE("mh_exchange: acceptance frequencies follow the ratio") {
  // Deterministic proposals (identity speaker theta): datum d proposes
  // speaker category c_d, so the acceptance probability is exactly
  // min(1, theta_li[prop][c] / theta_li[cur][c]).
  Toy toy = make_toy();
  toy.config.communication = CommunicationType::Proposed;
  const int reps = 10000;
  std::vector<int> accepted(4, 0);
  Rng rng(6);
  for (int rep = 0; rep < reps; ++rep) {
    GameState state = toy.state;  // fresh frozen state each repetition
    const auto flags =
        mh_exchange(state.agent_a, state.agent_b,
                    toy.dataset.observations_b, state.signs_b, toy.config, rng);
    for (int d = 0; d < 4; ++d) accepted[d] += flags[d];
  }
  std::vector<double> expected(4);
  for (int d = 0; d < 4; ++d)
    expected[d] = std::min(
        1.0, toy.state.agent_b.theta[toy.state.agent_a.categories[d]]
                                    [toy.state.agent_b.categories[d]] /
                 toy.state.agent_b.theta[toy.state.signs_b[d]]
                                        [toy.state.agent_b.categories[d]]);
  CHECK(expected[0] == doctest::Approx(0.3 / 0.8));
  CHECK(expected[1] == doctest::Approx(1.0));
  CHECK(expected[2] == doctest::Approx(1.0));
  CHECK(expected[3] == doctest::Approx(0.2 / 0.7));
  for (int d = 0; d < 4; ++d)
    CHECK(std::abs(static_cast<double>(accepted[d]) / reps - expected[d]) <
          0.02);
}

TEST_CASE("run_naming_game: determinism and zero iterations") {
  Rng gen(11);
  const Dataset dataset = generate_synthetic(small_synth(), gen);
  ModelConfig config =
      small_config(dataset, CommunicationType::Proposed, 99);

  const RunResult once = run_naming_game(config, dataset);
  const RunResult twice = run_naming_game(config, dataset);
  REQUIRE(once.trace.size() == config.iterations);
  for (std::size_t i = 0; i < once.trace.size(); ++i) {
    CHECK(once.trace[i].ari_a == twice.trace[i].ari_a);
    CHECK(once.trace[i].kappa == twice.trace[i].kappa);
    CHECK(once.trace[i].accept_rate_ab == twice.trace[i].accept_rate_ab);
  }
  CHECK(once.state.signs_a == twice.state.signs_a);

  config.iterations = 0;
  const RunResult zero = run_naming_game(config, dataset);
  CHECK(zero.trace.empty());
  Rng init_rng(config.seed);
  const GameState fresh = init_naming_game_state(config, dataset, init_rng);
  CHECK(zero.state.signs_a == fresh.signs_a);
  CHECK(zero.state.signs_b == fresh.signs_b);
  CHECK(zero.state.agent_a.categories == fresh.agent_a.categories);
}

TEST_CASE("run_naming_game: proposed mode converges on an easy instance") {
  SyntheticSpec synth = small_synth();
  synth.signature_weight = 0.6;  // well separated
  Rng gen(12);
  const Dataset dataset = generate_synthetic(synth, gen);
  const ModelConfig config =
      small_config(dataset, CommunicationType::Proposed, 5);
  const RunResult run = run_naming_game(config, dataset);
  const IterationRecord& first = run.trace.front();
  const IterationRecord& last = run.trace.back();
  CHECK(last.kappa > first.kappa + 0.3);
  CHECK(last.kappa > 0.6);
  CHECK(last.ari_a > 0.5);
  // Sign copies agree on most data once kappa is high.
  std::size_t agree = 0;
  for (std::size_t d = 0; d < dataset.size(); ++d)
    agree += run.state.signs_a[d] == run.state.signs_b[d] ? 1 : 0;
  CHECK(static_cast<double>(agree) / dataset.size() > 0.7);
}

TEST_CASE("run_naming_game: all-reject keeps the initial signs forever") {
  Rng gen(13);
  const Dataset dataset = generate_synthetic(small_synth(), gen);
  ModelConfig config = small_config(dataset, CommunicationType::AllReject, 77);
  const RunResult run = run_naming_game(config, dataset);
  Rng init_rng(config.seed);
  const GameState fresh = init_naming_game_state(config, dataset, init_rng);
  CHECK(run.state.signs_a == fresh.signs_a);
  CHECK(run.state.signs_b == fresh.signs_b);
  for (const IterationRecord& rec : run.trace) {
    CHECK(rec.accept_rate_ab == 0.0);
    CHECK(rec.accept_rate_ba == 0.0);
  }
}

TEST_CASE("gibbs: single sign and trace schema") {
  Rng gen(14);
  const Dataset dataset = generate_synthetic(small_synth(), gen);
  ModelConfig config =
      small_config(dataset, CommunicationType::IntegratedGibbs, 3);

  SUBCASE("K = 1 pins every sign to zero") {
    config.num_signs = 1;
    const RunResult run = gibbs_integrated(config, dataset);
    for (std::uint32_t w : run.state.signs_a) CHECK(w == 0);
    CHECK(run.state.signs_a == run.state.signs_b);
  }
  SUBCASE("kappa and acceptance rates are not applicable") {
    config.iterations = 5;
    const RunResult run = gibbs_integrated(config, dataset);
    REQUIRE(run.trace.size() == 5);
    for (const IterationRecord& rec : run.trace) {
      CHECK(std::isnan(rec.kappa));
      CHECK(std::isnan(rec.accept_rate_ab));
      CHECK_FALSE(std::isnan(rec.ari_a));
      CHECK_FALSE(std::isnan(rec.ari_w));
    }
    CHECK(run.state.signs_a == run.state.signs_b);
  }
  SUBCASE("dispatcher routes by communication type") {
    config.iterations = 2;
    const RunResult via_dispatch = run_model(config, dataset);
    const RunResult direct = gibbs_integrated(config, dataset);
    CHECK(via_dispatch.state.signs_a == direct.state.signs_a);
    CHECK_THROWS_AS(run_naming_game(config, dataset), Error);
  }
}

TEST_SUITE_END();
