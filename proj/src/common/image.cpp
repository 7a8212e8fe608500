// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lhdr/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lhdr {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::linear_hdr:
      return "linear_hdr";
    case Domain::nonlinear_sdr:
      return "nonlinear_sdr";
    case Domain::nonlinear_hdr:
      return "nonlinear_hdr";
  }
  return "unknown";
}

Image::Image(int w, int h, Domain d, float fill)
    : width(w), height(h), domain(d) {
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("image dims must be positive");
  }
  data.assign(static_cast<std::size_t>(w) * h * 3, fill);
}

float Image::max_value() const {
  if (data.empty()) return 0.0f;
  return *std::max_element(data.begin(), data.end());
}

void Image::validate() const {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image dims must be positive");
  }
  if (data.size() != pixel_count() * 3) {
    throw std::invalid_argument("image data length does not match dims");
  }
  for (float v : data) {
    if (!std::isfinite(v)) throw std::invalid_argument("image has non-finite values");
    if (v < 0.0f) {
      throw std::invalid_argument(std::string(to_string(domain)) +
                                  " image has negative values");
    }
    if (domain == Domain::nonlinear_sdr && v > 1.0f) {
      throw std::invalid_argument("nonlinear_sdr image has values above 1");
    }
  }
}

Image crop(const Image& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > img.width || y + h > img.height) {
    throw std::invalid_argument("crop window out of bounds");
  }
  Image out(w, h, img.domain);
  out.max_luminance = img.max_luminance;
  for (int r = 0; r < h; ++r) {
    const float* src = &img.data[(static_cast<std::size_t>(y + r) * img.width + x) * 3];
    std::copy(src, src + static_cast<std::size_t>(w) * 3,
              out.data.begin() + static_cast<std::ptrdiff_t>(r) * w * 3);
  }
  return out;
}

template <typename T>
BasicTensor<T> to_tensor(const Image& img) {
  BasicTensor<T> t(Shape{1, 3, img.height, img.width});
  const std::size_t plane = img.pixel_count();
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) t.ptr()[c * plane + i] = img.data[i * 3 + c];
  }
  return t;
}

template <typename T>
Image to_image(const BasicTensor<T>& t, Domain domain, int n) {
  if (t.c() != 3) {
    throw std::invalid_argument("to_image needs 3 channels, got " + t.shape().str());
  }
  Image img(t.w(), t.h(), domain);
  const std::size_t plane = img.pixel_count();
  const T* base = t.ptr() + static_cast<std::size_t>(n) * 3 * plane;
  for (std::size_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      img.data[i * 3 + c] = static_cast<float>(base[c * plane + i]);
    }
  }
  return img;
}

Tensor stack_images(std::span<const Image> images) {
  if (images.empty()) throw std::invalid_argument("stack_images: empty list");
  const int w = images[0].width;
  const int h = images[0].height;
  Tensor t(Shape{static_cast<int>(images.size()), 3, h, w});
  const std::size_t plane = static_cast<std::size_t>(w) * h;
  for (std::size_t n = 0; n < images.size(); ++n) {
    if (images[n].width != w || images[n].height != h) {
      throw std::invalid_argument("stack_images: size mismatch");
    }
    for (std::size_t i = 0; i < plane; ++i) {
      for (int c = 0; c < 3; ++c) {
        t.ptr()[(n * 3 + c) * plane + i] = images[n].data[i * 3 + c];
      }
    }
  }
  return t;
}

template BasicTensor<float> to_tensor<float>(const Image&);
template BasicTensor<double> to_tensor<double>(const Image&);
template Image to_image(const BasicTensor<float>&, Domain, int);
template Image to_image(const BasicTensor<double>&, Domain, int);

}  // namespace lhdr
