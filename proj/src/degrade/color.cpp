// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lhdr/degrade.hpp"

namespace lhdr::degrade {

namespace {

constexpr double kSrgbGamma = 2.2;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void require_finite(const Image& img, const char* who) {
  for (float v : img.data) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite value");
  }
}

}  // namespace

double determinant(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 inverse(const Mat3& m) {
  const double det = determinant(m);
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  if (!(std::abs(det) > 1e-12 * scale * scale * scale)) {
    throw std::invalid_argument("colour matrix is singular");
  }
  const double inv = 1.0 / det;
  return {(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
          (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
          (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
          (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
          (m[0] * m[4] - m[1] * m[3]) * inv};
}

Image srgb_encode(const Image& linear) {
  Image out = linear;
  for (float& v : out.data) v = static_cast<float>(std::pow(clamp01(v), 1.0 / kSrgbGamma));
  out.domain = Domain::nonlinear_sdr;
  out.max_luminance.reset();
  return out;
}

Image srgb_decode(const Image& nonlinear) {
  Image out = nonlinear;
  for (float& v : out.data) v = static_cast<float>(std::pow(clamp01(v), kSrgbGamma));
  out.domain = Domain::linear_hdr;
  return out;
}

Image cst_apply(const Image& img, const Mat3& m) {
  inverse(m);  // rejects singular matrices
  Image out = img;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double r = img.data[3 * i];
    const double g = img.data[3 * i + 1];
    const double b = img.data[3 * i + 2];
    for (int c = 0; c < 3; ++c) {
      out.data[3 * i + c] = static_cast<float>(m[3 * c] * r + m[3 * c + 1] * g + m[3 * c + 2] * b);
    }
  }
  return out;
}

Image add_camera_noise(const Image& linear, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  Image out = linear;
  if (sigma == 0.0) return out;
  const double s2 = sigma * sigma;
  for (float& v : out.data) {
    const double x = clamp01(v);
    const double sd = std::sqrt(s2 * x + s2);
    v = static_cast<float>(clamp01(x + rng.normal(0.0, sd)));
  }
  return out;
}

Image resize_bilinear(const Image& img, int width, int height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("resize target must be positive");
  if (width == img.width && height == img.height) return img;
  Image out(width, height, img.domain);
  out.max_luminance = img.max_luminance;
  const double sx = static_cast<double>(img.width) / width;
  const double sy = static_cast<double>(img.height) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) * (1 - wx) + img.at(x1, y0, c) * wx;
        const double bot = img.at(x0, y1, c) * (1 - wx) + img.at(x1, y1, c) * wx;
        out.at(x, y, c) = static_cast<float>(top * (1 - wy) + bot * wy);
      }
    }
  }
  return out;
}

Image virtual_shot(const Image& hdr, const DegradationConfig& cfg) {
  cfg.validate();
  require_finite(hdr, "virtual_shot");
  const Image shot = cst_apply(hdr, cfg.cst_matrix);
  Image out(hdr.width, hdr.height, Domain::nonlinear_sdr);
  const double levels = std::ldexp(1.0, cfg.quant_bits) - 1.0;
  const double range = cfg.clip_high - cfg.clip_low;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    const double exposed = static_cast<double>(shot.data[i]) * cfg.exposure_scale;
    const double v = (std::clamp(exposed, cfg.clip_low, cfg.clip_high) - cfg.clip_low) / range;
    const double encoded = std::pow(v, cfg.crf_gamma);
    out.data[i] = static_cast<float>(std::round(encoded * levels) / levels);
  }
  return out;
}

ExposureStats exposure_stats(const Image& sdr, int over_code, int under_code) {
  if (sdr.pixel_count() == 0) throw std::invalid_argument("exposure_stats: empty image");
  if (over_code < 0 || over_code > 255 || under_code < 0 || under_code > 255) {
    throw std::invalid_argument("exposure_stats: codes must lie in [0, 255]");
  }
  std::size_t over = 0;
  std::size_t under = 0;
  for (std::size_t i = 0; i < sdr.pixel_count(); ++i) {
    long code = 0;
    for (int c = 0; c < 3; ++c) {
      code = std::max(code, std::lround(clamp01(sdr.data[3 * i + c]) * 255.0));
    }
    if (code >= over_code) ++over;
    if (code <= under_code) ++under;
  }
  const double n = static_cast<double>(sdr.pixel_count());
  return ExposureStats{under / n, over / n};
}

}  // namespace lhdr::degrade
