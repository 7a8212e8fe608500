// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lhdr/rng.hpp"

namespace lhdr {

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x4c484452u};
  Rng rng;
  rng.engine_.seed(seq);
  return rng;
}

double Rng::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

int Rng::uniform_int(int lo, int hi) {
  if (lo == hi) return lo;
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

double Rng::normal(double mean, double stddev) {
  return std::normal_distribution<double>(mean, stddev)(engine_);
}

}  // namespace lhdr
