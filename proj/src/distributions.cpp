// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/distributions.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "intermdm/error.hpp"

namespace intermdm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_gamma_fn(double x) {
#ifdef __GLIBC__
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

bool is_valid_simplex(std::span<const double> probs) {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= kSimplexSumTol;
}

void validate_simplex(std::span<const double> probs, const char* where) {
  if (!is_valid_simplex(probs))
    throw_runtime(std::string(where) + ": invalid probability simplex");
}

void validate_dirichlet_params(std::span<const double> alphas,
                               const char* where) {
  if (alphas.empty())
    throw_runtime(std::string(where) + ": empty concentration vector");
  for (double a : alphas)
    if (!(a > 0.0) || !std::isfinite(a))
      throw_runtime(std::string(where) +
                    ": concentrations must be strictly positive");
}

Simplex sample_dirichlet(const DirichletParams& params, Rng& rng) {
  validate_dirichlet_params(params, "sample_dirichlet");
  const std::size_t n = params.size();
  if (n == 1) return Simplex{1.0};

  std::vector<double> logs(n);
  double max_log = kNegInf;
  for (std::size_t i = 0; i < n; ++i) {
    logs[i] = rng.log_gamma_draw(params[i]);
    if (logs[i] > max_log) max_log = logs[i];
  }
  if (!std::isfinite(max_log))
    throw_runtime("sample_dirichlet: degenerate gamma draws");

  Simplex probs(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp(logs[i] - max_log);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  assert(is_valid_simplex(probs));
  return probs;
}

std::uint32_t sample_index_from_weights(std::span<const double> weights,
                                        Rng& rng) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw_runtime("sample_index_from_weights: negative or non-finite weight");
    total += w;
  }
  if (!(total > 0.0))
    throw_runtime("sample_index_from_weights: zero normalizer");

  const double u = rng.uniform01() * total;
  double cum = 0.0;
  std::uint32_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<std::uint32_t>(i);
    cum += weights[i];
    if (u < cum) return last_positive;
  }
  return last_positive;  // floating point slack at the top of the CDF
}

std::uint32_t sample_index_from_log_weights(std::span<const double> log_weights,
                                            Rng& rng) {
  double max_log = kNegInf;
  for (double lw : log_weights) {
    if (std::isnan(lw))
      throw_runtime("sample_index_from_log_weights: NaN weight");
    if (lw > max_log) max_log = lw;
  }
  if (!std::isfinite(max_log))
    throw_runtime("sample_index_from_log_weights: all weights are zero");

  std::vector<double> w(log_weights.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = std::exp(log_weights[i] - max_log);
  return sample_index_from_weights(w, rng);
}

std::uint32_t sample_categorical(const Simplex& probs, Rng& rng) {
  validate_simplex(probs, "sample_categorical");
  return sample_index_from_weights(probs, rng);
}

Histogram sample_multinomial(std::uint32_t total, const Simplex& probs,
                             Rng& rng) {
  if (total < 1) throw_runtime("sample_multinomial: total must be >= 1");
  validate_simplex(probs, "sample_multinomial");
  Histogram counts(probs.size(), 0);
  for (std::uint32_t t = 0; t < total; ++t)
    counts[sample_index_from_weights(probs, rng)] += 1;
  return counts;
}

double multinomial_log_pmf_nocoeff(const Histogram& counts,
                                   const Simplex& probs) {
  if (counts.size() != probs.size())
    throw_runtime("multinomial_log_pmf: counts/probs length mismatch");
  double acc = 0.0;
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (counts[v] == 0) continue;
    if (probs[v] <= 0.0) return kNegInf;
    acc += static_cast<double>(counts[v]) * std::log(probs[v]);
  }
  return acc;
}

double multinomial_log_pmf(const Histogram& counts, const Simplex& probs) {
  const double body = multinomial_log_pmf_nocoeff(counts, probs);
  if (body == kNegInf) return kNegInf;
  std::uint64_t total = 0;
  double log_coeff = 0.0;
  for (std::uint32_t c : counts) {
    total += c;
    log_coeff -= log_gamma_fn(static_cast<double>(c) + 1.0);
  }
  log_coeff += log_gamma_fn(static_cast<double>(total) + 1.0);
  return log_coeff + body;
}

}  // namespace intermdm
