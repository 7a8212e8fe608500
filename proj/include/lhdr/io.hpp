// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lhdr/image.hpp"
#include "lhdr/kv.hpp"
#include "lhdr/rng.hpp"

namespace lhdr::io {

using Bytes = std::vector<std::uint8_t>;

// All readers throw ParseError on malformed input.

/// Colour PFM ("PF"). Reads either endianness; writes little-endian
/// (scale -1). Rows are stored bottom-up.
Image read_pfm(std::span<const std::uint8_t> bytes);
Bytes write_pfm(const Image& img);

/// Radiance RGBE. Reads flat and new-style run-length scanlines with a
/// "-Y h +X w" resolution line; writes run-length scanlines where the
/// format allows them.
Image read_rgbe(std::span<const std::uint8_t> bytes);
Bytes write_rgbe(const Image& img);

/// Decodes one RGBE quadruple: mantissa / 256 * 2^(e - 128).
std::array<float, 3> rgbe_decode(const std::array<std::uint8_t, 4>& rgbe);
/// Shared-exponent encoding with round-to-nearest mantissas.
std::array<std::uint8_t, 4> rgbe_encode(float r, float g, float b);

/// Binary P6 with maxval 255 or 65535. Codes map to code / maxval.
Image read_ppm(std::span<const std::uint8_t> bytes);
/// Code = floor(v * maxval + 0.5) after clamping to [0, 1].
Bytes write_ppm(const Image& img, int bit_depth = 8);

enum class Format { pfm, rgbe, ppm };

/// .pfm, .hdr and .ppm (case-insensitive); anything else throws.
Format format_for(const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img, int ppm_bit_depth = 8);

/// Regular files in `dir` with a supported extension, sorted by name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

struct Patch {
  Image image;
  int x = 0;
  int y = 0;
  bool whole_image = false;  // source smaller than the patch size
};

/// `count` random crops of size x size at offsets drawn from `rng`.
std::vector<Patch> extract_patches(const Image& img, int size, int count, Rng& rng);

struct ImageExposure {
  std::string name;
  int width = 0;
  int height = 0;
  double under_fraction = 0.0;
  double over_fraction = 0.0;
};

/// Per-image exposure fractions and their aggregate. Standard deviations
/// use the population formula.
struct DatasetReport {
  std::vector<ImageExposure> images;
  int over_code = 255;
  int under_code = 0;
  double under_mean = 0.0;
  double under_stdev = 0.0;
  double over_mean = 0.0;
  double over_stdev = 0.0;
  int min_width = 0;
  int min_height = 0;
  int max_width = 0;
  int max_height = 0;

  /// Aligned table; averages in percent with 3 decimals, stdev as a
  /// fraction with 4 decimals.
  std::string to_text() const;
  KeyValues to_kv() const;
};

DatasetReport dataset_stats(std::span<const Image> images,
                            std::span<const std::string> names = {},
                            int over_code = 255, int under_code = 0);

}  // namespace lhdr::io
