// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "intermdm/distributions.hpp"

namespace intermdm {

/// Adjusted Rand index between two labelings of the same items.
/// Permutation-invariant and symmetric. When the pair-counting denominator
/// is zero (both partitions identical and trivial) returns 1.0.
double ari(std::span<const std::uint32_t> labels_a,
           std::span<const std::uint32_t> labels_b);

/// Cohen's kappa between two sign sequences: observed agreement corrected
/// by the chance agreement of the empirical marginals. Both sequences
/// constant and equal (chance agreement 1) returns 1.0.
double kappa(std::span<const std::uint32_t> signs_a,
             std::span<const std::uint32_t> signs_b);

enum class KappaBand : std::uint8_t {
  NoAgreement,   // < 0
  Slight,        // [0.00, 0.21)
  Fair,          // [0.21, 0.41)
  Moderate,      // [0.41, 0.61)
  Substantial,   // [0.61, 0.81)
  AlmostPerfect  // [0.81, 1.00]
};

/// Qualitative band for a kappa value; band edges belong to the upper band.
KappaBand kappa_band(double k);
const char* to_string(KappaBand band);

enum class LogBase : std::uint8_t { Natural, Two };

/// Cosine similarity between two non-negative count vectors.
/// Throws on a zero vector.
double cosine_similarity(const Histogram& a, const Histogram& b);

/// Jensen-Shannon divergence between two distributions (0*log 0 := 0).
double jsd(const Simplex& p, const Simplex& q,
           LogBase base = LogBase::Natural);

/// JSD between two histograms after normalizing each to a distribution.
/// Throws on a zero-sum histogram.
double jsd_histograms(const Histogram& a, const Histogram& b,
                      LogBase base = LogBase::Natural);

/// Mean of per-datum cosine similarities over paired sets.
double mean_cosine(const std::vector<Histogram>& set_a,
                   const std::vector<Histogram>& set_b);

/// Mean of per-datum JSD over paired sets, histograms normalized internally.
double mean_jsd(const std::vector<Histogram>& set_a,
                const std::vector<Histogram>& set_b,
                LogBase base = LogBase::Natural);

enum class SignificanceBand : std::uint8_t {
  StrongSignificant,  // p < 0.01  -> "**"
  Significant,        // p < 0.05  -> "*"
  NotSignificant      // otherwise -> "n.s."
};

const char* to_string(SignificanceBand band);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  SignificanceBand band = SignificanceBand::NotSignificant;
};

/// Welch's unequal-variance two-sided t-test. Both samples need >= 2
/// values. Zero variance in both samples: equal means give p = 1, distinct
/// means give p = 0.
TTestResult welch_t_test(const std::vector<double>& sample_a,
                         const std::vector<double>& sample_b);

}  // namespace intermdm
