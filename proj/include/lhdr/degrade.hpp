// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string_view>
#include <utility>

#include "lhdr/image.hpp"
#include "lhdr/kv.hpp"
#include "lhdr/rng.hpp"

namespace lhdr::degrade {

/// Row-major 3x3 matrix applied as out = M * rgb.
using Mat3 = std::array<double, 9>;

inline constexpr Mat3 kIdentity = {1, 0, 0, 0, 1, 0, 0, 0, 1};
/// Generic wide-gamut camera RGB to sRGB-like matrix; rows sum to 1.
inline constexpr Mat3 kDefaultCameraMatrix = {1.6, -0.5, -0.1, -0.2, 1.4, -0.2,
                                              0.0, -0.5, 1.5};

struct DegradationConfig {
  // Virtual shot.
  double exposure_scale = 1.0;
  double crf_gamma = 1.0 / 2.2;
  double clip_low = 0.0;
  double clip_high = 1.0;
  int quant_bits = 8;
  // Conventional chain.
  std::pair<double, double> noise_sigma_range{0.001, 0.003};
  std::pair<int, int> jpeg_qf1_range{60, 80};
  int jpeg_qf2 = 75;
  std::pair<double, double> rescale_range{0.7, 1.0};
  Mat3 cst_matrix = kDefaultCameraMatrix;
  std::uint64_t seed = 0;

  void validate() const;
  KeyValues to_kv() const;
  /// Keys absent from `kv` keep their defaults; unknown keys are errors.
  static DegradationConfig from_kv(const KeyValues& kv);
  static DegradationConfig load(const std::filesystem::path& path);
};

double determinant(const Mat3& m);
/// Throws std::invalid_argument for a singular matrix.
Mat3 inverse(const Mat3& m);

Image srgb_encode(const Image& linear);
Image srgb_decode(const Image& nonlinear);
Image cst_apply(const Image& img, const Mat3& m);

/// x + n with n ~ N(0, sigma^2 x + sigma^2), clamped to [0, 1].
Image add_camera_noise(const Image& linear, double sigma, Rng& rng);

/// 8x8 block DCT quantisation roundtrip in YCbCr with 4:2:0 chroma.
/// Output is not requantised to 8 bits.
Image jpeg_sim(const Image& img, int qf);

/// Standard quantisation table (luma or chroma) scaled to `qf`.
std::array<int, 64> jpeg_quant_table(int qf, bool chroma);

/// Bilinear resampling with pixel-centre alignment and clamped borders.
Image resize_bilinear(const Image& img, int width, int height);

/// HDR to SDR: exposure, colour transform, clip and renormalise, CRF power,
/// quantisation.
Image virtual_shot(const Image& hdr, const DegradationConfig& cfg);

struct ConventionalParams {
  double sigma = 0.0;
  int qf1 = 0;
  int qf2 = 0;
  double scale = 1.0;
  int scaled_width = 0;
  int scaled_height = 0;

  KeyValues to_kv() const;
};

struct Degraded {
  Image image;
  ConventionalParams params;
};

/// Receives every intermediate image, tagged with the stage just applied.
using StageObserver = std::function<void(std::string_view stage, const Image&)>;

/// decode, inverse CST, noise, CST, encode, JPEG(qf1), rescale, JPEG(qf2),
/// rescale back. Draws sigma, qf1 and scale from `rng` in that order.
Degraded conventional_degrade(const Image& sdr, const DegradationConfig& cfg, Rng& rng,
                              const StageObserver& observer = {});

struct ExposureStats {
  double under_fraction = 0.0;
  double over_fraction = 0.0;
};

/// Pixel codes are round(v * 255). A pixel is over-exposed when its largest
/// channel code is >= over_code and under-exposed when its largest channel
/// code is <= under_code.
ExposureStats exposure_stats(const Image& sdr, int over_code = 255, int under_code = 0);

}  // namespace lhdr::degrade
