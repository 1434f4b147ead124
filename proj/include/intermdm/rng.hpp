// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace intermdm {

/// Seeded 64-bit generator plus the scalar sampling transforms the model
/// needs. All transforms are implemented here (not via std:: distributions)
/// so that a fixed seed and call sequence reproduces the same stream on any
/// platform built from the same sources. A handle must not be shared across
/// threads; derive one per trial with derive_seed().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1]. Used for acceptance draws so that a forced
  /// acceptance rate of 0 or 1 is exact.
  double uniform01_open() { return 1.0 - uniform01(); }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  /// Gamma(shape, 1) for shape > 0.
  double gamma(double shape);

  /// log of a Gamma(shape, 1) draw. Stays finite for tiny shapes where the
  /// linear-space draw would underflow to zero.
  double log_gamma_draw(double shape);

 private:
  double gamma_ge1(double shape);

  std::mt19937_64 engine_;
  std::uint64_t seed_;
};

/// Deterministic seed derivation (splitmix64 folding). Used to give every
/// trial / cell its own independent stream from one base seed.
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> tags);

}  // namespace intermdm
