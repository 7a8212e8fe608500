// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>
#include <string>

#include "cursor.hpp"
#include "lhdr/io.hpp"

namespace lhdr::io {

namespace {

constexpr int kMinRle = 8;
constexpr int kMaxRle = 0x7fff;

// One channel of a new-style RLE scanline.
void read_rle_channel(detail::Cursor& cur, std::uint8_t* dst, int width) {
  int x = 0;
  while (x < width) {
    int count = cur.byte();
    if (count > 128) {
      count -= 128;
      if (count > width - x) cur.fail("run overflows scanline");
      const std::uint8_t v = cur.byte();
      for (int i = 0; i < count; ++i) dst[4 * (x + i)] = v;
    } else {
      if (count == 0 || count > width - x) cur.fail("bad literal count in scanline");
      const auto lit = cur.take(static_cast<std::size_t>(count));
      for (int i = 0; i < count; ++i) dst[4 * (x + i)] = lit[i];
    }
    x += count;
  }
}

void write_rle_channel(Bytes& out, const std::uint8_t* src, int width) {
  int x = 0;
  while (x < width) {
    // Find the next run of at least 4 equal bytes.
    int run_start = x;
    int run_len = 0;
    while (run_start < width) {
      run_len = 1;
      while (run_start + run_len < width && run_len < 127 &&
             src[4 * (run_start + run_len)] == src[4 * run_start]) {
        ++run_len;
      }
      if (run_len >= 4) break;
      run_start += run_len;
    }
    if (run_start >= width) run_len = 0;
    while (x < run_start) {
      const int n = std::min(128, run_start - x);
      out.push_back(static_cast<std::uint8_t>(n));
      for (int i = 0; i < n; ++i) out.push_back(src[4 * (x + i)]);
      x += n;
    }
    if (run_len >= 4) {
      out.push_back(static_cast<std::uint8_t>(128 + run_len));
      out.push_back(src[4 * run_start]);
      x += run_len;
    }
  }
}

}  // namespace

std::array<float, 3> rgbe_decode(const std::array<std::uint8_t, 4>& rgbe) {
  if (rgbe[3] == 0) return {0.0f, 0.0f, 0.0f};
  const double f = std::ldexp(1.0, rgbe[3] - 136);
  return {static_cast<float>(rgbe[0] * f), static_cast<float>(rgbe[1] * f),
          static_cast<float>(rgbe[2] * f)};
}

std::array<std::uint8_t, 4> rgbe_encode(float r, float g, float b) {
  const double rgb[3] = {std::max(0.0f, r), std::max(0.0f, g), std::max(0.0f, b)};
  const double v = std::max({rgb[0], rgb[1], rgb[2]});
  if (!std::isfinite(v)) throw std::invalid_argument("RGBE cannot encode non-finite values");
  if (v < 1e-38) return {0, 0, 0, 0};
  int e = 0;
  std::frexp(v, &e);
  // v = m * 2^e with m in [0.5, 1): channel mantissas are rgb * 2^(8 - e).
  double scale = std::ldexp(1.0, 8 - e);
  if (std::floor(v * scale + 0.5) >= 256.0) {
    ++e;
    scale *= 0.5;
  }
  if (e + 128 > 255) throw std::invalid_argument("value too large for RGBE");
  if (e + 128 < 1) return {0, 0, 0, 0};
  std::array<std::uint8_t, 4> out{};
  for (int c = 0; c < 3; ++c) out[c] = static_cast<std::uint8_t>(std::floor(rgb[c] * scale + 0.5));
  out[3] = static_cast<std::uint8_t>(e + 128);
  return out;
}

Image read_rgbe(std::span<const std::uint8_t> bytes) {
  detail::Cursor cur(bytes, "RGBE");
  const std::string sig = cur.line(256);
  if (!sig.starts_with("#?RADIANCE") && !sig.starts_with("#?RGBE")) {
    cur.fail("bad signature");
  }
  for (int lines = 0;; ++lines) {
    if (lines > 1024) cur.fail("header too long");
    std::string l = cur.line();
    if (!l.empty() && l.back() == '\r') l.pop_back();
    if (l.empty()) break;
    if (l.starts_with("FORMAT=") && l != "FORMAT=32-bit_rle_rgbe") {
      cur.fail("unsupported pixel format '" + l.substr(7, 32) + "'");
    }
  }
  const std::string res = cur.line(256);
  std::istringstream rs(res);
  std::string ya, yv, xa, xv, extra;
  rs >> ya >> yv >> xa >> xv;
  if (ya != "-Y" || xa != "+X" || (rs >> extra)) {
    cur.fail("unsupported resolution line '" + res.substr(0, 64) + "'");
  }
  const int h = detail::parse_dim(cur, yv, "height");
  const int w = detail::parse_dim(cur, xv, "width");
  const bool rle_width = w >= kMinRle && w <= kMaxRle;
  // Smallest possible encoding of the whole image, checked before allocating.
  const std::size_t min_scan = rle_width ? 4 + 8 * static_cast<std::size_t>((w + 126) / 127)
                                         : static_cast<std::size_t>(w) * 4;
  if (cur.remaining() / min_scan < static_cast<std::size_t>(h)) cur.fail("truncated payload");

  Image img;
  img.width = w;
  img.height = h;
  img.domain = Domain::linear_hdr;
  img.data.resize(static_cast<std::size_t>(w) * h * 3);
  std::vector<std::uint8_t> scan(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < h; ++y) {
    if (rle_width) {
      const auto head = cur.take(4);
      if (head[0] == 2 && head[1] == 2 && (head[2] & 0x80) == 0) {
        if (((head[2] << 8) | head[3]) != w) cur.fail("scanline length mismatch");
        for (int c = 0; c < 4; ++c) read_rle_channel(cur, scan.data() + c, w);
      } else {
        std::copy(head.begin(), head.end(), scan.begin());
        const auto rest = cur.take(static_cast<std::size_t>(w - 1) * 4);
        std::copy(rest.begin(), rest.end(), scan.begin() + 4);
      }
    } else {
      const auto flat = cur.take(static_cast<std::size_t>(w) * 4);
      std::copy(flat.begin(), flat.end(), scan.begin());
    }
    for (int x = 0; x < w; ++x) {
      const auto v = rgbe_decode({scan[4 * x], scan[4 * x + 1], scan[4 * x + 2], scan[4 * x + 3]});
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v[c];
    }
  }
  return img;
}

Bytes write_rgbe(const Image& img) {
  if (img.width <= 0 || img.height <= 0 || img.data.size() != img.pixel_count() * 3) {
    throw std::invalid_argument("write_rgbe: malformed image");
  }
  const std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " +
                             std::to_string(img.height) + " +X " +
                             std::to_string(img.width) + "\n";
  Bytes out(header.begin(), header.end());
  const int w = img.width;
  std::vector<std::uint8_t> scan(static_cast<std::size_t>(w) * 4);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto q = rgbe_encode(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
      std::copy(q.begin(), q.end(), scan.begin() + 4 * x);
    }
    if (w < kMinRle || w > kMaxRle) {
      out.insert(out.end(), scan.begin(), scan.end());
      continue;
    }
    out.push_back(2);
    out.push_back(2);
    out.push_back(static_cast<std::uint8_t>(w >> 8));
    out.push_back(static_cast<std::uint8_t>(w & 0xff));
    for (int c = 0; c < 4; ++c) write_rle_channel(out, scan.data() + c, w);
  }
  return out;
}

}  // namespace lhdr::io
