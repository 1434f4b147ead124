// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one pass/fail line per criterion. The paper-scale runs
// use the default configuration (K = L = 15, D = 150, 200 iterations,
// 10 trials). Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "intermdm/crossmodal.hpp"
#include "intermdm/harness.hpp"
#include "intermdm/inference.hpp"
#include "intermdm/metrics.hpp"
#include "intermdm/serialize.hpp"

using namespace intermdm;

namespace {

constexpr std::uint64_t kSeed = 20260809;

struct Criterion {
  int id;
  std::string label;
  bool pass = false;
  std::string detail;
};

std::vector<Criterion> g_criteria;

void report(int id, const std::string& label, bool pass,
            const std::string& detail) {
  g_criteria.push_back({id, label, pass, detail});
  std::printf("[%s] criterion %d: %s — %s\n", pass ? "PASS" : "FAIL", id,
              label.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v, int precision = 3) {
  return format_double(v, precision);
}

std::uint32_t workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

const CellResult& cell_of(const ExperimentResults& results, int condition,
                          const std::string& pattern, CommunicationType comm) {
  for (const CellResult& cell : results.cells)
    if (cell.condition == condition && cell.pattern == pattern &&
        cell.comm == comm)
      return cell;
  throw std::logic_error("cell not found");
}

ExperimentSpec paper_spec() {
  ExperimentSpec spec = experiment_spec_from_json(nlohmann::json::object());
  spec.base_seed = kSeed;
  spec.parallel = workers();
  return spec;
}

// ---- criteria 1 and 2: condition 1 table -------------------------------

void criteria_1_2() {
  const auto start = std::chrono::steady_clock::now();
  ExperimentSpec spec = paper_spec();
  spec.conditions = {{1, "-"}};
  const ExperimentResults results = run_experiment(spec);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const CellResult& prop =
      cell_of(results, 1, "-", CommunicationType::Proposed);
  const CellResult& acc =
      cell_of(results, 1, "-", CommunicationType::AllAccept);
  const CellResult& rej =
      cell_of(results, 1, "-", CommunicationType::AllReject);
  const CellResult& gibbs =
      cell_of(results, 1, "-", CommunicationType::IntegratedGibbs);

  const bool c1 = prop.ari_a.mean >= 0.85 && prop.ari_b.mean >= 0.85 &&
                  prop.kappa_mean >= 0.90 && rej.kappa_mean >= -0.1 &&
                  rej.kappa_mean <= 0.1 &&
                  prop.kappa_mean - acc.kappa_mean >= 0.2;
  report(1, "condition-1 synthetic table", c1,
         "proposed ari_a=" + fmt(prop.ari_a.mean) +
             " ari_b=" + fmt(prop.ari_b.mean) +
             " kappa=" + fmt(prop.kappa_mean) +
             "; all_reject kappa=" + fmt(rej.kappa_mean) +
             "; all_accept kappa=" + fmt(acc.kappa_mean) + "; " +
             fmt(elapsed, 1) + "s for 40 runs");

  const double diff_a = std::abs(prop.ari_a.mean - gibbs.ari_a.mean);
  const double diff_b = std::abs(prop.ari_b.mean - gibbs.ari_b.mean);
  const double p_a = gibbs.ari_a.vs_proposed ? gibbs.ari_a.vs_proposed->p : 1.0;
  const double p_b = gibbs.ari_b.vs_proposed ? gibbs.ari_b.vs_proposed->p : 1.0;
  const bool c2 = diff_a <= 0.05 && diff_b <= 0.05 && p_a >= 0.05 && p_b >= 0.05;
  report(2, "proposed vs integrated-Gibbs parity", c2,
         "|dA|=" + fmt(diff_a) + " |dB|=" + fmt(diff_b) + " pA=" + fmt(p_a) +
             " pB=" + fmt(p_b) + " (n.s. needed)");

  // The A- and B-side sign copies must tell the same story for the
  // proposed algorithm (the table reports the A side).
  double w_gap = 0.0;
  for (const TrialOutcome& t : prop.trials)
    w_gap = std::max(w_gap, std::abs(t.ari_w - t.ari_w_b));
  if (w_gap > 0.05)
    std::printf("  note: max |ARI(wA)-ARI(wB)| = %s on proposed runs\n",
                fmt(w_gap).c_str());
}

// ---- criteria 3 and 4: missing-modality conditions ----------------------

void criteria_3_4() {
  ExperimentSpec spec = paper_spec();
  spec.conditions = {{2, "I"}, {2, "II"}, {2, "III"}, {3, "I"}, {3, "II"},
                     {3, "III"}, {4, "I"}, {4, "II"}, {4, "III"}};
  spec.comm_types = {CommunicationType::Proposed,
                     CommunicationType::AllReject};
  const ExperimentResults results = run_experiment(spec);

  bool c3 = true;
  std::string c3_detail;
  for (int condition : {3, 4}) {
    for (const std::string pattern : {"I", "II", "III"}) {
      const CellResult& prop =
          cell_of(results, condition, pattern, CommunicationType::Proposed);
      const CellResult& rej =
          cell_of(results, condition, pattern, CommunicationType::AllReject);
      const double gain = prop.ari_b.mean - rej.ari_b.mean;
      const double p = rej.ari_b.vs_proposed ? rej.ari_b.vs_proposed->p : 1.0;
      const bool ok = gain >= 0.05 && p < 0.05;
      c3 = c3 && ok;
      c3_detail += std::to_string(condition) + pattern + ":+" + fmt(gain, 2) +
                   "(p=" + fmt(p, 4) + ") ";
    }
  }
  report(3, "missing-modality gain (conditions 3-4)", c3, c3_detail);

  bool c4 = true;
  std::string c4_detail;
  for (const std::string pattern : {"I", "II", "III"}) {
    const CellResult& prop =
        cell_of(results, 2, pattern, CommunicationType::Proposed);
    const CellResult& rej =
        cell_of(results, 2, pattern, CommunicationType::AllReject);
    const bool ok = prop.ari_w_mean >= rej.ari_b.mean;
    c4 = c4 && ok;
    c4_detail += "2" + pattern + ": ariW=" + fmt(prop.ari_w_mean, 2) +
                 " vs rejB=" + fmt(rej.ari_b.mean, 2) + " ";
  }
  report(4, "top-down constraint (condition 2, ARI(W) vs impaired ARI)", c4,
         c4_detail);
}

// ---- criterion 5: integrated sampler vs brute-force posterior -----------

// Exact log marginal of one assignment (C^A, C^B, W) with the Dirichlet
// parameters integrated out (Dirichlet-multinomial conjugacy). Multinomial
// coefficients depend only on the fixed data and drop out after
// normalization over assignments.
double log_joint(const std::vector<std::uint32_t>& ca,
                 const std::vector<std::uint32_t>& cb,
                 const std::vector<std::uint32_t>& w, const Dataset& data,
                 double alpha, double beta, const Simplex& gamma) {
  const int num_signs = 2;
  const int num_categories = 2;
  const int bins = 2;
  double lp = 0.0;
  for (std::uint32_t wd : w) lp += std::log(gamma[wd]);

  auto log_multibeta = [](const std::vector<double>& v) {
    double sum = 0.0;
    double lg = 0.0;
    for (double x : v) {
      sum += x;
      lg += log_gamma_fn(x);
    }
    return lg - log_gamma_fn(sum);
  };

  for (int agent = 0; agent < 2; ++agent) {
    const auto& c = agent == 0 ? ca : cb;
    const auto& obs =
        agent == 0 ? data.observations_a : data.observations_b;
    // P(C | W): one Dirichlet-multinomial block per sign.
    for (int k = 0; k < num_signs; ++k) {
      std::vector<double> counts(num_categories, alpha);
      for (std::size_t d = 0; d < w.size(); ++d)
        if (w[d] == static_cast<std::uint32_t>(k)) counts[c[d]] += 1.0;
      lp += log_multibeta(counts) -
            log_multibeta(std::vector<double>(num_categories, alpha));
    }
    // P(O | C): one block per category.
    for (int l = 0; l < num_categories; ++l) {
      std::vector<double> counts(bins, beta);
      for (std::size_t d = 0; d < c.size(); ++d) {
        if (c[d] != static_cast<std::uint32_t>(l)) continue;
        const Histogram& h = obs[d].at(0);
        for (int v = 0; v < bins; ++v) counts[v] += h[v];
      }
      lp += log_multibeta(counts) -
            log_multibeta(std::vector<double>(bins, beta));
    }
  }
  return lp;
}

void criterion_5() {
  Dataset data;
  data.modalities = {"vision"};
  data.bins = {2};
  data.true_labels = {0, 1, 0};
  auto push = [&](std::vector<Observation>& obs, Histogram h) {
    Observation o;
    o.by_modality = {std::move(h)};
    obs.push_back(std::move(o));
  };
  push(data.observations_a, {2, 0});
  push(data.observations_a, {0, 2});
  push(data.observations_a, {1, 1});
  push(data.observations_b, {2, 0});
  push(data.observations_b, {1, 1});
  push(data.observations_b, {0, 2});

  ModelConfig config;
  config.num_signs = 2;
  config.num_categories = 2;
  config.num_data = 3;
  config.modalities = {"vision"};
  config.bins = {2};
  config.alpha = 0.3;
  config.beta = {0.4};
  config.iterations = 1;
  config.communication = CommunicationType::IntegratedGibbs;
  config.seed = kSeed;
  const Simplex gamma = config.sign_prior();

  // Brute-force posterior over the 8 sign assignments.
  std::vector<double> log_post(8, -std::numeric_limits<double>::infinity());
  for (int wi = 0; wi < 8; ++wi) {
    std::vector<std::uint32_t> w{static_cast<std::uint32_t>(wi & 1),
                                 static_cast<std::uint32_t>((wi >> 1) & 1),
                                 static_cast<std::uint32_t>((wi >> 2) & 1)};
    double acc = -std::numeric_limits<double>::infinity();
    for (int ci = 0; ci < 8; ++ci)
      for (int cj = 0; cj < 8; ++cj) {
        std::vector<std::uint32_t> ca{static_cast<std::uint32_t>(ci & 1),
                                      static_cast<std::uint32_t>((ci >> 1) & 1),
                                      static_cast<std::uint32_t>((ci >> 2) & 1)};
        std::vector<std::uint32_t> cb{static_cast<std::uint32_t>(cj & 1),
                                      static_cast<std::uint32_t>((cj >> 1) & 1),
                                      static_cast<std::uint32_t>((cj >> 2) & 1)};
        const double lp =
            log_joint(ca, cb, w, data, config.alpha, 0.4, gamma);
        acc = acc > lp ? acc + std::log1p(std::exp(lp - acc))
                       : lp + std::log1p(std::exp(acc - lp));
      }
    log_post[wi] = acc;
  }
  double max_lp = *std::max_element(log_post.begin(), log_post.end());
  std::vector<double> exact(8);
  double norm = 0.0;
  for (int i = 0; i < 8; ++i) {
    exact[i] = std::exp(log_post[i] - max_lp);
    norm += exact[i];
  }
  for (double& x : exact) x /= norm;

  // Long chain, counting W after burn-in.
  Rng rng(config.seed);
  GameState state = init_gibbs_state(config, data, rng);
  const int burn_in = 5000;
  const int samples = 100000;
  std::vector<double> empirical(8, 0.0);
  for (int i = 0; i < burn_in + samples; ++i) {
    gibbs_sweep(state, config, data, rng);
    if (i < burn_in) continue;
    const int key = static_cast<int>(state.signs_a[0]) |
                    (static_cast<int>(state.signs_a[1]) << 1) |
                    (static_cast<int>(state.signs_a[2]) << 2);
    empirical[key] += 1.0;
  }
  for (double& x : empirical) x /= samples;

  double tv = 0.0;
  for (int i = 0; i < 8; ++i) tv += std::abs(empirical[i] - exact[i]);
  tv *= 0.5;
  report(5, "integrated sampler matches brute-force posterior", tv <= 0.05,
         "total variation " + fmt(tv, 4) + " over 8 sign assignments (1e5 "
         "post-burn-in sweeps)");
}

// ---- criterion 6: M-H acceptance calibration -----------------------------

void criterion_6() {
  // Frozen state; the speaker's theta is an identity map so datum d always
  // proposes the speaker's category and the per-datum acceptance target is
  // exactly min(1, theta[prop][c] / theta[cur][c]).
  ModelConfig config;
  config.num_signs = 2;
  config.num_categories = 2;
  config.num_data = 4;
  config.modalities = {"vision"};
  config.bins = {2};
  config.alpha = 0.1;
  config.beta = {0.1};
  config.iterations = 1;
  config.seed = 5;

  Dataset data;
  data.modalities = {"vision"};
  data.bins = {2};
  data.true_labels = {0, 1, 0, 1};
  for (int d = 0; d < 4; ++d) {
    Observation o;
    o.by_modality = {Histogram{1, 1}};
    data.observations_a.push_back(o);
    data.observations_b.push_back(o);
  }

  AgentState speaker;
  speaker.modality_present = {1};
  speaker.phi = {{{0.5, 0.5}, {0.5, 0.5}}};
  speaker.theta = {{1.0, 0.0}, {0.0, 1.0}};
  speaker.categories = {1, 0, 0, 0};

  AgentState listener;
  listener.modality_present = {1};
  listener.phi = {{{0.5, 0.5}, {0.5, 0.5}}};
  listener.theta = {{0.8, 0.2}, {0.3, 0.7}};
  listener.categories = {0, 1, 0, 1};
  const std::vector<std::uint32_t> signs{0, 0, 1, 1};

  std::vector<double> expected(4);
  for (int d = 0; d < 4; ++d)
    expected[d] =
        std::min(1.0, listener.theta[speaker.categories[d]]
                                    [listener.categories[d]] /
                          listener.theta[signs[d]][listener.categories[d]]);

  const int reps = 10000;
  std::vector<int> accepted(4, 0);
  Rng rng(123);
  for (int rep = 0; rep < reps; ++rep) {
    AgentState fresh = listener;
    std::vector<std::uint32_t> w = signs;
    const auto flags = mh_exchange(speaker, fresh, data.observations_b, w,
                                   config, rng);
    for (int d = 0; d < 4; ++d) accepted[d] += flags[d];
  }
  double worst = 0.0;
  for (int d = 0; d < 4; ++d)
    worst = std::max(worst, std::abs(static_cast<double>(accepted[d]) / reps -
                                     expected[d]));
  report(6, "M-H acceptance calibration", worst <= 0.02,
         "max |empirical - min(1, ratio)| = " + fmt(worst, 4) +
             " over 1e4 repetitions");
}

// ---- criterion 7: cross-modal ordering -----------------------------------

void criterion_7() {
  int good_seeds = 0;
  std::string detail;
  for (std::uint64_t s = 0; s < 5; ++s) {
    CrossmodalSpec spec;
    spec.base_seed = kSeed + 1000 + s;
    const CrossmodalReport report_s = run_crossmodal_eval(spec);
    const CrossmodalRow& prop = report_s.rows[0];
    const CrossmodalRow& acc = report_s.rows[1];
    const CrossmodalRow& rej = report_s.rows[2];
    bool ok = true;
    for (std::size_t m = 0; m < report_s.modalities.size(); ++m) {
      ok = ok && prop.mean_cosine[m] > acc.mean_cosine[m] &&
           acc.mean_cosine[m] > rej.mean_cosine[m];
      ok = ok && prop.mean_jsd[m] < acc.mean_jsd[m] &&
           acc.mean_jsd[m] < rej.mean_jsd[m];
    }
    good_seeds += ok ? 1 : 0;
    detail += ok ? "+" : "-";
    if (s == 0)
      detail += " (seed0 haptic cos: " + fmt(prop.mean_cosine[2], 2) + "/" +
                fmt(acc.mean_cosine[2], 2) + "/" + fmt(rej.mean_cosine[2], 2) +
                ") ";
  }
  report(7, "cross-modal ordering across 5 seeds", good_seeds >= 4,
         detail + " -> " + std::to_string(good_seeds) + "/5 seeds");
}

// ---- criterion 8: metric oracles -----------------------------------------

void criterion_8() {
  bool pass = true;
  std::string detail;
  auto expect = [&](bool ok, const char* what) {
    pass = pass && ok;
    if (!ok) detail += std::string(what) + " ";
  };

  const std::vector<std::uint32_t> x{0, 0, 1, 1};
  const std::vector<std::uint32_t> y{0, 0, 1, 2};
  expect(std::abs(ari(x, x) - 1.0) < 1e-6, "ari-identical");
  expect(std::abs(ari(x, y) - 4.0 / 7.0) < 1e-6, "ari-example");
  const std::vector<std::uint32_t> same{1, 1, 1, 1};
  const std::vector<std::uint32_t> distinct{0, 1, 2, 3};
  expect(std::abs(ari(same, distinct)) < 1e-6, "ari-degenerate");

  const std::vector<std::uint32_t> ka{0, 0, 1, 1};
  const std::vector<std::uint32_t> kb{0, 1, 1, 1};
  expect(std::abs(kappa(ka, ka) - 1.0) < 1e-6, "kappa-identical");
  expect(std::abs(kappa(ka, kb) - 0.5) < 1e-6, "kappa-example");

  expect(std::abs(mean_cosine({{1, 1}, {0, 2}}, {{1, 0}, {0, 5}}) -
                  (std::sqrt(0.5) + 1.0) / 2.0) < 1e-6,
         "cosine-example");
  expect(std::abs(mean_jsd({{1, 0}}, {{0, 1}}) - std::log(2.0)) < 1e-6,
         "jsd-example");

  // Invariants over randomized inputs.
  Rng rng(31337);
  for (int rep = 0; rep < 100 && pass; ++rep) {
    std::vector<std::uint32_t> a(25);
    std::vector<std::uint32_t> b(25);
    for (auto& v : a) v = static_cast<std::uint32_t>(rng.uniform_below(5));
    for (auto& v : b) v = static_cast<std::uint32_t>(rng.uniform_below(4));
    expect(std::abs(ari(a, b) - ari(b, a)) < 1e-12, "ari-symmetry");
    expect(std::abs(kappa(a, b) - kappa(b, a)) < 1e-12, "kappa-symmetry");

    Histogram h1(6);
    Histogram h2(6);
    for (auto& v : h1) v = static_cast<std::uint32_t>(rng.uniform_below(9));
    for (auto& v : h2) v = static_cast<std::uint32_t>(rng.uniform_below(9));
    h1[0] += 1;
    h2[5] += 1;
    const double c = cosine_similarity(h1, h2);
    expect(c >= 0.0 && c <= 1.0 + 1e-12, "cosine-range");
    const double d = jsd_histograms(h1, h2);
    expect(d >= 0.0 && d <= std::log(2.0) + 1e-12, "jsd-range");
    expect(d == jsd_histograms(h2, h1), "jsd-symmetry");
  }
  report(8, "metric oracles and invariants", pass,
         pass ? "all unit examples at 1e-6, invariants over 100 random inputs"
              : "failed: " + detail);
}

// ---- criterion 9: byte-identical reruns ----------------------------------

void criterion_9() {
  nlohmann::json config{
      {"model", {{"K", 8}, {"L", 8}, {"iterations", 40}}},
      {"data",
       {{"source", "synthetic"},
        {"num_objects", 8},
        {"per_object", 5},
        {"bins", 12},
        {"total", 60}}},
      {"experiment",
       {{"trials", 2},
        {"seed", 31415926},
        {"conditions",
         nlohmann::json::array({{{"condition", 1}},
                                {{"condition", 3}, {"pattern", "I"}}})},
        {"communication_types",
         {"proposed", "all_accept", "all_reject", "integrated_gibbs"}}}},
  };

  ExperimentSpec spec1 = experiment_spec_from_json(config);
  spec1.parallel = 1;
  ExperimentSpec spec2 = spec1;
  spec2.parallel = 2;

  const auto dir1 = std::filesystem::temp_directory_path() / "intermdm_acc_1";
  const auto dir2 = std::filesystem::temp_directory_path() / "intermdm_acc_2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  write_results(run_experiment(spec1), dir1.string(), "all");
  write_results(run_experiment(spec2), dir2.string(), "all");

  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const bool csv_equal =
      slurp(dir1 / "results.csv") == slurp(dir2 / "results.csv");
  const bool traces_equal =
      slurp(dir1 / "traces.csv") == slurp(dir2 / "traces.csv");
  const bool jsonl_equal =
      slurp(dir1 / "traces.jsonl") == slurp(dir2 / "traces.jsonl");
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  report(9, "byte-identical result CSVs across reruns and schedules",
         csv_equal && traces_equal && jsonl_equal,
         std::string("results.csv ") + (csv_equal ? "==" : "!=") +
             ", traces.csv " + (traces_equal ? "==" : "!=") +
             ", traces.jsonl " + (jsonl_equal ? "==" : "!="));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criteria_1_2();
  criteria_3_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();

  int failed = 0;
  for (const Criterion& c : g_criteria) failed += c.pass ? 0 : 1;
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("acceptance: %zu criteria, %d failed, %.1fs total\n",
              g_criteria.size(), failed, elapsed);
  return failed;
}
