// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace lhdr {

/// Seedable generator with explicit state. Every stochastic routine in the
/// library draws only from an Rng passed by the caller.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream for item `index` of a run seeded with `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t index);

  double uniform(double lo, double hi);
  /// Inclusive integer range.
  int uniform_int(int lo, int hi);
  double normal(double mean = 0.0, double stddev = 1.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lhdr
