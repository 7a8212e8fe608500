// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "lhdr/train.hpp"

namespace lhdr::train {

Preprocessed preprocess_gamma(const Image& hdr, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  for (float v : hdr.data) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw std::invalid_argument("preprocess_gamma: HDR values must be finite and >= 0");
    }
  }
  const double max_y = hdr.max_value();
  if (!(max_y > 0.0)) throw std::invalid_argument("preprocess_gamma: all-zero image");
  Preprocessed out{hdr, max_y};
  for (float& v : out.image.data) v = static_cast<float>(std::pow(v / max_y, gamma));
  out.image.domain = Domain::nonlinear_hdr;
  out.image.max_luminance = max_y;
  return out;
}

Image postprocess_gamma(const Image& nonlinear, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  Image out = nonlinear;
  for (float& v : out.data) {
    v = static_cast<float>(std::pow(std::max(0.0, static_cast<double>(v)), 1.0 / gamma));
  }
  out.domain = Domain::linear_hdr;
  return out;
}

}  // namespace lhdr::train
