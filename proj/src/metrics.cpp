// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "intermdm/error.hpp"

namespace intermdm {

namespace {

// Dense relabeling so contingency tables stay small.
std::vector<std::uint32_t> compact_labels(std::span<const std::uint32_t> labels,
                                          std::size_t& num_distinct) {
  std::map<std::uint32_t, std::uint32_t> remap;
  std::vector<std::uint32_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] =
        remap.emplace(labels[i], static_cast<std::uint32_t>(remap.size()));
    out[i] = it->second;
  }
  num_distinct = remap.size();
  return out;
}

double comb2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double ari(std::span<const std::uint32_t> labels_a,
           std::span<const std::uint32_t> labels_b) {
  if (labels_a.size() != labels_b.size())
    throw_runtime("ari: labelings must have equal length");
  if (labels_a.size() < 2)
    throw_runtime("ari: need at least two items");

  std::size_t na = 0;
  std::size_t nb = 0;
  const std::vector<std::uint32_t> a = compact_labels(labels_a, na);
  const std::vector<std::uint32_t> b = compact_labels(labels_b, nb);

  std::vector<double> contingency(na * nb, 0.0);
  std::vector<double> row(na, 0.0);
  std::vector<double> col(nb, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    contingency[a[i] * nb + b[i]] += 1.0;
    row[a[i]] += 1.0;
    col[b[i]] += 1.0;
  }

  double sum_cells = 0.0;
  for (double c : contingency) sum_cells += comb2(c);
  double sum_rows = 0.0;
  for (double r : row) sum_rows += comb2(r);
  double sum_cols = 0.0;
  for (double c : col) sum_cols += comb2(c);

  const double total_pairs = comb2(static_cast<double>(a.size()));
  const double expected = sum_rows * sum_cols / total_pairs;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;  // both partitions trivial and equal
  return (sum_cells - expected) / (maximum - expected);
}

double kappa(std::span<const std::uint32_t> signs_a,
             std::span<const std::uint32_t> signs_b) {
  if (signs_a.size() != signs_b.size())
    throw_runtime("kappa: sequences must have equal length");
  if (signs_a.empty()) throw_runtime("kappa: empty sequences");

  const double n = static_cast<double>(signs_a.size());
  std::map<std::uint32_t, double> freq_a;
  std::map<std::uint32_t, double> freq_b;
  double observed = 0.0;
  for (std::size_t i = 0; i < signs_a.size(); ++i) {
    freq_a[signs_a[i]] += 1.0;
    freq_b[signs_b[i]] += 1.0;
    if (signs_a[i] == signs_b[i]) observed += 1.0;
  }
  observed /= n;

  double chance = 0.0;
  for (const auto& [sign, count_a] : freq_a) {
    auto it = freq_b.find(sign);
    if (it != freq_b.end()) chance += (count_a / n) * (it->second / n);
  }
  if (chance >= 1.0) return 1.0;  // both sequences constant and equal
  return (observed - chance) / (1.0 - chance);
}

KappaBand kappa_band(double k) {
  if (k > 1.0 + 1e-12) throw_runtime("kappa_band: kappa cannot exceed 1");
  if (k >= 0.81) return KappaBand::AlmostPerfect;
  if (k >= 0.61) return KappaBand::Substantial;
  if (k >= 0.41) return KappaBand::Moderate;
  if (k >= 0.21) return KappaBand::Fair;
  if (k >= 0.0) return KappaBand::Slight;
  return KappaBand::NoAgreement;
}

const char* to_string(KappaBand band) {
  switch (band) {
    case KappaBand::NoAgreement: return "no-agreement";
    case KappaBand::Slight: return "slight";
    case KappaBand::Fair: return "fair";
    case KappaBand::Moderate: return "moderate";
    case KappaBand::Substantial: return "substantial";
    case KappaBand::AlmostPerfect: return "almost-perfect";
  }
  return "unknown";
}

double cosine_similarity(const Histogram& a, const Histogram& b) {
  if (a.size() != b.size())
    throw_runtime("cosine_similarity: dimension mismatch");
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = static_cast<double>(a[i]);
    const double y = static_cast<double>(b[i]);
    dot += x * y;
    norm_a += x * x;
    norm_b += y * y;
  }
  if (norm_a == 0.0 || norm_b == 0.0)
    throw_runtime("cosine_similarity: zero vector has no direction");
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

namespace {

double kl_to_mid(const Simplex& p, const Simplex& mid, double log_scale) {
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;  // 0 * log 0 := 0
    acc += p[i] * std::log(p[i] / mid[i]);
  }
  return acc * log_scale;
}

Simplex normalize_histogram(const Histogram& h, const char* where) {
  double sum = 0.0;
  for (std::uint32_t c : h) sum += static_cast<double>(c);
  if (sum <= 0.0)
    throw_runtime(std::string(where) + ": zero-sum histogram");
  Simplex p(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    p[i] = static_cast<double>(h[i]) / sum;
  return p;
}

}  // namespace

double jsd(const Simplex& p, const Simplex& q, LogBase base) {
  if (p.size() != q.size()) throw_runtime("jsd: dimension mismatch");
  validate_simplex(p, "jsd");
  validate_simplex(q, "jsd");
  Simplex mid(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mid[i] = 0.5 * (p[i] + q[i]);
  const double scale = base == LogBase::Two ? 1.0 / std::log(2.0) : 1.0;
  return 0.5 * (kl_to_mid(p, mid, scale) + kl_to_mid(q, mid, scale));
}

double jsd_histograms(const Histogram& a, const Histogram& b, LogBase base) {
  return jsd(normalize_histogram(a, "jsd"), normalize_histogram(b, "jsd"),
             base);
}

double mean_cosine(const std::vector<Histogram>& set_a,
                   const std::vector<Histogram>& set_b) {
  if (set_a.size() != set_b.size() || set_a.empty())
    throw_runtime("mean_cosine: sets must be non-empty and paired");
  double acc = 0.0;
  for (std::size_t d = 0; d < set_a.size(); ++d)
    acc += cosine_similarity(set_a[d], set_b[d]);
  return acc / static_cast<double>(set_a.size());
}

double mean_jsd(const std::vector<Histogram>& set_a,
                const std::vector<Histogram>& set_b, LogBase base) {
  if (set_a.size() != set_b.size() || set_a.empty())
    throw_runtime("mean_jsd: sets must be non-empty and paired");
  double acc = 0.0;
  for (std::size_t d = 0; d < set_a.size(); ++d)
    acc += jsd_histograms(set_a[d], set_b[d], base);
  return acc / static_cast<double>(set_a.size());
}

const char* to_string(SignificanceBand band) {
  switch (band) {
    case SignificanceBand::StrongSignificant: return "**";
    case SignificanceBand::Significant: return "*";
    case SignificanceBand::NotSignificant: return "n.s.";
  }
  return "unknown";
}

TTestResult welch_t_test(const std::vector<double>& sample_a,
                         const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    throw_runtime("welch_t_test: each sample needs at least two values");

  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  const double mean_a =
      std::accumulate(sample_a.begin(), sample_a.end(), 0.0) / na;
  const double mean_b =
      std::accumulate(sample_b.begin(), sample_b.end(), 0.0) / nb;

  double var_a = 0.0;
  for (double x : sample_a) var_a += (x - mean_a) * (x - mean_a);
  var_a /= na - 1.0;
  double var_b = 0.0;
  for (double x : sample_b) var_b += (x - mean_b) * (x - mean_b);
  var_b /= nb - 1.0;

  TTestResult result;
  const double se2 = var_a / na + var_b / nb;
  if (se2 == 0.0) {
    if (mean_a == mean_b) {
      result.t = 0.0;
      result.p = 1.0;
    } else {
      result.t = mean_a > mean_b ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
      result.p = 0.0;
    }
  } else {
    result.t = (mean_a - mean_b) / std::sqrt(se2);
    const double df =
        se2 * se2 /
        (var_a * var_a / (na * na * (na - 1.0)) +
         var_b * var_b / (nb * nb * (nb - 1.0)));
    boost::math::students_t_distribution<double> dist(df);
    result.p = 2.0 * boost::math::cdf(dist, -std::abs(result.t));
  }

  if (result.p < 0.01)
    result.band = SignificanceBand::StrongSignificant;
  else if (result.p < 0.05)
    result.band = SignificanceBand::Significant;
  else
    result.band = SignificanceBand::NotSignificant;
  return result;
}

}  // namespace intermdm
