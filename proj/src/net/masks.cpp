// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <stdexcept>

#include "lhdr/net.hpp"

namespace lhdr::net {

double bright_valid(double p, double t) {
  p = std::clamp(p, 0.0, 1.0);
  return std::max(0.0, (p - t) / (1.0 - t));
}

double bright_invalid(double p, double t) {
  p = std::clamp(p, 0.0, 1.0);
  return std::min((p - 1.0) / (t - 1.0), 1.0);
}

template <typename T>
MaskPair<T> make_masks(const BasicTensor<T>& prior, double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("mask threshold must lie in (0, 1)");
  }
  const BasicTensor<T> p = ops::channel_max(prior);
  MaskPair<T> masks{BasicTensor<T>(p.shape()), BasicTensor<T>(p.shape())};
  const auto src = p.data();
  auto valid = masks.bright_valid.data();
  auto invalid = masks.bright_invalid.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    valid[i] = static_cast<T>(bright_valid(src[i], t));
    invalid[i] = static_cast<T>(bright_invalid(src[i], t));
  }
  return masks;
}

template MaskPair<float> make_masks(const BasicTensor<float>&, double);
template MaskPair<double> make_masks(const BasicTensor<double>&, double);

}  // namespace lhdr::net
