// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "lhdr/tensor.hpp"

namespace lhdr {

enum class Domain {
  linear_hdr,     // scene-referred, values >= 0
  nonlinear_sdr,  // display-referred, values in [0, 1]
  nonlinear_hdr,  // gamma-encoded HDR estimate, values >= 0
};

std::string_view to_string(Domain d);

/// Three-channel interleaved RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  Domain domain = Domain::linear_hdr;
  std::optional<double> max_luminance;
  std::vector<float> data;  // width * height * 3, row-major, RGB interleaved

  Image() = default;
  Image(int w, int h, Domain d, float fill = 0.0f);

  static constexpr int channels = 3;

  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * height;
  }
  float& at(int x, int y, int c) {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  float at(int x, int y, int c) const {
    return data[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  float max_value() const;

  /// Checks data length and the domain's value range.
  void validate() const;
};

/// The w x h window at (x, y); throws if it leaves the image.
Image crop(const Image& img, int x, int y, int w, int h);

/// Planar (1, 3, h, w) tensor copy of an image.
template <typename T = float>
BasicTensor<T> to_tensor(const Image& img);

/// Image from batch entry `n` of a 3-channel tensor.
template <typename T>
Image to_image(const BasicTensor<T>& t, Domain domain, int n = 0);

/// Stacks images of equal size into one (n, 3, h, w) tensor.
Tensor stack_images(std::span<const Image> images);

}  // namespace lhdr
