// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "intermdm/rng.hpp"

namespace intermdm {

/// Probability vector: entries >= 0, sum within 1e-9 of 1, length >= 1.
using Simplex = std::vector<double>;

/// Dirichlet concentrations: strictly positive, length >= 1.
using DirichletParams = std::vector<double>;

/// Non-negative integer counts over a fixed feature vocabulary.
using Histogram = std::vector<std::uint32_t>;

inline constexpr double kSimplexSumTol = 1e-9;

bool is_valid_simplex(std::span<const double> probs);
void validate_simplex(std::span<const double> probs, const char* where);
void validate_dirichlet_params(std::span<const double> alphas,
                               const char* where);

/// Draw from Dirichlet(params). Computed from log-gamma draws with a max
/// shift so that tiny concentrations (e.g. 0.001) do not underflow the
/// whole vector.
Simplex sample_dirichlet(const DirichletParams& params, Rng& rng);

/// Draw an outcome index with P(i) = probs[i].
std::uint32_t sample_categorical(const Simplex& probs, Rng& rng);

/// Draw an index proportional to non-negative weights (need not sum to 1).
/// Throws on a zero or non-finite total.
std::uint32_t sample_index_from_weights(std::span<const double> weights,
                                        Rng& rng);

/// Draw an index proportional to exp(log_weights), max-shifted first.
std::uint32_t sample_index_from_log_weights(std::span<const double> log_weights,
                                            Rng& rng);

/// Histogram of `total` categorical draws from probs.
Histogram sample_multinomial(std::uint32_t total, const Simplex& probs,
                             Rng& rng);

/// Log multinomial pmf including the multinomial coefficient.
/// Returns -inf when some count is positive where probs is zero.
double multinomial_log_pmf(const Histogram& counts, const Simplex& probs);

/// Coefficient-free variant: sum of counts[v] * log(probs[v]). This is what
/// the category posteriors use; the coefficient depends only on the counts
/// and cancels after normalization across categories.
double multinomial_log_pmf_nocoeff(const Histogram& counts,
                                   const Simplex& probs);

/// lgamma wrapper, thread-safe on glibc.
double log_gamma_fn(double x);

}  // namespace intermdm
