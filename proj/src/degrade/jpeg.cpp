// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lhdr/degrade.hpp"

namespace lhdr::degrade {

namespace {

constexpr std::array<int, 64> kLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

constexpr std::array<int, 64> kChromaTable = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// Full-range YCbCr without the +128 chroma offset.
constexpr Mat3 kToYcc = {0.299,     0.587,     0.114,  -0.168736, -0.331264,
                         0.5,       0.5,       -0.418688, -0.081312};

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;
  double& at(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

// Orthonormal DCT-II basis, basis[u][x].
const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) {
        b[u * 8 + x] = cu * std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
      }
    }
    return b;
  }();
  return basis;
}

void roundtrip_block(double* block, const std::array<int, 64>& table) {
  const auto& b = dct_basis();
  double tmp[64];
  double coef[64];
  for (int y = 0; y < 8; ++y) {
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int x = 0; x < 8; ++x) s += b[u * 8 + x] * block[y * 8 + x];
      tmp[y * 8 + u] = s;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 8; ++u) {
      double s = 0;
      for (int y = 0; y < 8; ++y) s += b[v * 8 + y] * tmp[y * 8 + u];
      const double q = table[v * 8 + u];
      coef[v * 8 + u] = std::round(s / q) * q;
    }
  }
  for (int v = 0; v < 8; ++v) {
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int u = 0; u < 8; ++u) s += b[u * 8 + x] * coef[v * 8 + u];
      tmp[v * 8 + x] = s;
    }
  }
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      double s = 0;
      for (int v = 0; v < 8; ++v) s += b[v * 8 + y] * tmp[v * 8 + x];
      block[y * 8 + x] = s;
    }
  }
}

// Blocks past the edge are filled by edge replication and discarded after.
void roundtrip_plane(Plane& p, const std::array<int, 64>& table, double offset) {
  double block[64];
  for (int by = 0; by < p.h; by += 8) {
    for (int bx = 0; bx < p.w; bx += 8) {
      for (int y = 0; y < 8; ++y) {
        const int sy = std::min(by + y, p.h - 1);
        for (int x = 0; x < 8; ++x) {
          block[y * 8 + x] = p.at(std::min(bx + x, p.w - 1), sy) - offset;
        }
      }
      roundtrip_block(block, table);
      for (int y = 0; y < 8 && by + y < p.h; ++y) {
        for (int x = 0; x < 8 && bx + x < p.w; ++x) p.at(bx + x, by + y) = block[y * 8 + x] + offset;
      }
    }
  }
}

Plane subsample(const Plane& p) {
  Plane out{(p.w + 1) / 2, (p.h + 1) / 2, {}};
  out.v.resize(static_cast<std::size_t>(out.w) * out.h);
  for (int y = 0; y < out.h; ++y) {
    const int y0 = 2 * y;
    const int y1 = std::min(2 * y + 1, p.h - 1);
    for (int x = 0; x < out.w; ++x) {
      const int x0 = 2 * x;
      const int x1 = std::min(2 * x + 1, p.w - 1);
      out.at(x, y) = 0.25 * (p.at(x0, y0) + p.at(x1, y0) + p.at(x0, y1) + p.at(x1, y1));
    }
  }
  return out;
}

}  // namespace

std::array<int, 64> jpeg_quant_table(int qf, bool chroma) {
  if (qf < 1 || qf > 100) {
    throw std::invalid_argument("JPEG quality must lie in [1, 100], got " + std::to_string(qf));
  }
  const int scale = qf < 50 ? 5000 / qf : 200 - 2 * qf;
  const auto& base = chroma ? kChromaTable : kLumaTable;
  std::array<int, 64> out{};
  for (int i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

Image jpeg_sim(const Image& img, int qf) {
  const auto luma_table = jpeg_quant_table(qf, false);
  const auto chroma_table = jpeg_quant_table(qf, true);
  static const Mat3 from_ycc = inverse(kToYcc);

  const int w = img.width;
  const int h = img.height;
  Plane planes[3];
  for (auto& p : planes) p = Plane{w, h, std::vector<double>(img.pixel_count())};
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double r = img.data[3 * i] * 255.0;
    const double g = img.data[3 * i + 1] * 255.0;
    const double b = img.data[3 * i + 2] * 255.0;
    for (int c = 0; c < 3; ++c) {
      planes[c].v[i] = kToYcc[3 * c] * r + kToYcc[3 * c + 1] * g + kToYcc[3 * c + 2] * b;
    }
  }

  roundtrip_plane(planes[0], luma_table, 128.0);
  Plane cb = subsample(planes[1]);
  Plane cr = subsample(planes[2]);
  roundtrip_plane(cb, chroma_table, 0.0);
  roundtrip_plane(cr, chroma_table, 0.0);

  Image out = img;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double ycc[3] = {planes[0].at(x, y), cb.at(x / 2, y / 2), cr.at(x / 2, y / 2)};
      for (int c = 0; c < 3; ++c) {
        const double v = from_ycc[3 * c] * ycc[0] + from_ycc[3 * c + 1] * ycc[1] +
                         from_ycc[3 * c + 2] * ycc[2];
        out.at(x, y, c) = static_cast<float>(std::clamp(v / 255.0, 0.0, 1.0));
      }
    }
  }
  return out;
}

}  // namespace lhdr::degrade
