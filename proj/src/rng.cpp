// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#include "intermdm/rng.hpp"

#include <cmath>

#include "intermdm/error.hpp"

namespace intermdm {

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw_runtime("uniform_below: n must be positive");
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  const double u1 = uniform01_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

double Rng::gamma_ge1(double shape) {
  // Marsaglia-Tsang squeeze method, shape >= 1.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw_runtime("gamma: shape must be positive");
  if (shape >= 1.0) return gamma_ge1(shape);
  // Boost from shape+1: G(a) = G(a+1) * U^(1/a).
  return gamma_ge1(shape + 1.0) *
         std::pow(uniform01_open(), 1.0 / shape);
}

double Rng::log_gamma_draw(double shape) {
  if (!(shape > 0.0)) throw_runtime("log_gamma_draw: shape must be positive");
  if (shape >= 1.0) return std::log(gamma_ge1(shape));
  return std::log(gamma_ge1(shape + 1.0)) +
         std::log(uniform01_open()) / shape;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t tag : tags) {
    state ^= tag + 0x9E3779B97F4A7C15ULL + (out << 6) + (out >> 2);
    out = splitmix64(state);
  }
  return out;
}

}  // namespace intermdm
