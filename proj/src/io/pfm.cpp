// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <charconv>
#include <cmath>
#include <string>

#include "cursor.hpp"
#include "lhdr/io.hpp"

namespace lhdr::io {

namespace detail {

int parse_dim(Cursor& cur, const std::string& token, const char* what) {
  long long v = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || end != token.data() + token.size()) {
    cur.fail(std::string("invalid ") + what + " '" + token + "'");
  }
  if (v <= 0) cur.fail(std::string(what) + " must be positive, got " + token);
  if (v > (1 << 20)) cur.fail(std::string(what) + " " + token + " is too large");
  return static_cast<int>(v);
}

}  // namespace detail

Image read_pfm(std::span<const std::uint8_t> bytes) {
  detail::Cursor cur(bytes, "PFM");
  const std::string magic = cur.token(false);
  if (magic == "Pf") cur.fail("grayscale 'Pf' files are not supported; only colour 'PF'");
  if (magic != "PF") cur.fail("bad signature '" + magic.substr(0, 8) + "'");
  const int w = detail::parse_dim(cur, cur.token(false), "width");
  const int h = detail::parse_dim(cur, cur.token(false), "height");
  const std::string scale_token = cur.token(false);
  double scale = 0.0;
  const auto [end, ec] =
      std::from_chars(scale_token.data(), scale_token.data() + scale_token.size(), scale);
  if (ec != std::errc() || end != scale_token.data() + scale_token.size() ||
      !std::isfinite(scale) || scale == 0.0) {
    cur.fail("invalid scale '" + scale_token + "'");
  }
  cur.header_end();

  const std::size_t count = static_cast<std::size_t>(w) * h * 3;
  if (cur.remaining() / 4 < count) cur.fail("truncated payload");
  const auto payload = cur.take(count * 4);
  const bool little = scale < 0;

  Image img;
  img.width = w;
  img.height = h;
  img.domain = Domain::linear_hdr;
  img.data.resize(count);
  const std::size_t row = static_cast<std::size_t>(w) * 3;
  for (int y = 0; y < h; ++y) {
    const std::uint8_t* src = payload.data() + static_cast<std::size_t>(h - 1 - y) * row * 4;
    float* dst = img.data.data() + static_cast<std::size_t>(y) * row;
    for (std::size_t i = 0; i < row; ++i) {
      const std::uint8_t* b = src + 4 * i;
      const std::uint32_t u =
          little ? b[0] | b[1] << 8 | b[2] << 16 | static_cast<std::uint32_t>(b[3]) << 24
                 : b[3] | b[2] << 8 | b[1] << 16 | static_cast<std::uint32_t>(b[0]) << 24;
      dst[i] = std::bit_cast<float>(u);
    }
  }
  return img;
}

Bytes write_pfm(const Image& img) {
  if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count() * 3) {
    throw std::invalid_argument("write_pfm: malformed image");
  }
  const std::string header =
      "PF\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n-1.0\n";
  Bytes out(header.begin(), header.end());
  const std::size_t row = static_cast<std::size_t>(img.width) * 3;
  out.reserve(out.size() + img.data.size() * 4);
  for (int y = img.height - 1; y >= 0; --y) {
    for (std::size_t i = 0; i < row; ++i) {
      const auto u = std::bit_cast<std::uint32_t>(img.data[y * row + i]);
      for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
    }
  }
  return out;
}

}  // namespace lhdr::io
