// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "cursor.hpp"
#include "lhdr/io.hpp"

namespace lhdr::io {

Image read_ppm(std::span<const std::uint8_t> bytes) {
  detail::Cursor cur(bytes, "PPM");
  const std::string magic = cur.token(false);
  if (magic != "P6") cur.fail("only binary 'P6' files are supported");
  const int w = detail::parse_dim(cur, cur.token(true), "width");
  const int h = detail::parse_dim(cur, cur.token(true), "height");
  const std::string maxval_token = cur.token(true);
  if (maxval_token != "255" && maxval_token != "65535") {
    cur.fail("unsupported maxval '" + maxval_token + "' (expected 255 or 65535)");
  }
  cur.header_end();
  const bool wide = maxval_token == "65535";
  const double maxval = wide ? 65535.0 : 255.0;
  const std::size_t count = static_cast<std::size_t>(w) * h * 3;
  const std::size_t width = wide ? 2 : 1;
  if (cur.remaining() / width < count) cur.fail("truncated payload");
  const auto payload = cur.take(count * width);

  Image img;
  img.width = w;
  img.height = h;
  img.domain = Domain::nonlinear_sdr;
  img.data.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned code = wide ? (payload[2 * i] << 8) | payload[2 * i + 1] : payload[i];
    img.data[i] = static_cast<float>(code / maxval);
  }
  return img;
}

Bytes write_ppm(const Image& img, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw std::invalid_argument("PPM bit depth must be 8 or 16");
  }
  if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count() * 3) {
    throw std::invalid_argument("write_ppm: malformed image");
  }
  const int maxval = bit_depth == 8 ? 255 : 65535;
  const std::string header = "P6\n" + std::to_string(img.width) + " " +
                             std::to_string(img.height) + "\n" + std::to_string(maxval) + "\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + img.data.size() * (bit_depth / 8));
  for (float v : img.data) {
    const double x = std::isnan(v) ? 0.0 : std::clamp(static_cast<double>(v), 0.0, 1.0);
    const auto code = static_cast<unsigned>(std::floor(x * maxval + 0.5));
    if (bit_depth == 16) out.push_back(static_cast<std::uint8_t>(code >> 8));
    out.push_back(static_cast<std::uint8_t>(code & 0xff));
  }
  return out;
}

}  // namespace lhdr::io
