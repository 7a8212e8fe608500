// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lhdr/train.hpp"

namespace lhdr::train {

namespace {

double smoothstep(double e0, double e1, double x) {
  const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3 - 2 * t);
}

}  // namespace

Image synthetic_hdr_scene(int width, int height, Rng& rng) {
  Image img(width, height, Domain::linear_hdr);
  const double s = std::min(width, height);

  double sky_top[3];
  double sky_bottom[3];
  for (int c = 0; c < 3; ++c) {
    sky_top[c] = rng.uniform(0.3, 1.0);
    sky_bottom[c] = rng.uniform(0.05, 0.5);
  }
  for (int y = 0; y < height; ++y) {
    const double t = static_cast<double>(y) / std::max(1, height - 1);
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(sky_top[c] * (1 - t) + sky_bottom[c] * t);
    }
  }

  const int shapes = rng.uniform_int(2, 5);
  for (int i = 0; i < shapes; ++i) {
    const double cx = rng.uniform(0, width);
    const double cy = rng.uniform(0, height);
    const double rx = rng.uniform(0.1, 0.4) * s;
    const double ry = rng.uniform(0.1, 0.4) * s;
    const double shade = rng.uniform(-0.5, 0.5);
    double color[3];
    for (double& c : color) c = rng.uniform(0.02, 0.8);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        const double r = std::sqrt(dx * dx + dy * dy);
        const double a = 1.0 - smoothstep(0.9, 1.0, r);
        if (a <= 0) continue;
        const double light = std::max(0.05, 1.0 + shade * dx);
        for (int c = 0; c < 3; ++c) {
          float& v = img.at(x, y, c);
          v = static_cast<float>(v * (1 - a) + a * color[c] * light);
        }
      }
    }
  }

  const double fx = rng.uniform(2, 8) * 2 * std::numbers::pi / s;
  const double fy = rng.uniform(2, 8) * 2 * std::numbers::pi / s;
  const double phase = rng.uniform(0, 2 * std::numbers::pi);
  const double amp = rng.uniform(0.05, 0.2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double tex = 1.0 + amp * std::sin(fx * x + phase) * std::cos(fy * y);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(img.at(x, y, c) * tex);
    }
  }

  const int lights = rng.uniform_int(1, 3);
  for (int i = 0; i < lights; ++i) {
    const double cx = rng.uniform(0, width);
    const double cy = rng.uniform(0, height);
    const double radius = rng.uniform(0.03, 0.1) * s;
    const double peak = std::exp(rng.uniform(std::log(4.0), std::log(60.0)));
    double tint[3];
    for (double& t : tint) t = rng.uniform(0.7, 1.0);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double d2 = ((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (radius * radius);
        if (d2 > 25) continue;
        const double g = peak * std::exp(-0.5 * d2);
        for (int c = 0; c < 3; ++c) img.at(x, y, c) += static_cast<float>(g * tint[c]);
      }
    }
  }
  return img;
}

TrainPair make_pair(Image hdr, const degrade::DegradationConfig& shot, double saturated) {
  if (!(saturated >= 0 && saturated < 1)) {
    throw std::invalid_argument("make_pair: saturated fraction must lie in [0, 1)");
  }
  hdr.validate();
  // Exposure that puts the requested fraction of camera-space pixel maxima
  // above the clip point.
  const Image cam = degrade::cst_apply(hdr, shot.cst_matrix);
  std::vector<float> peaks(cam.pixel_count());
  for (std::size_t p = 0; p < peaks.size(); ++p) {
    peaks[p] = std::max({cam.data[3 * p], cam.data[3 * p + 1], cam.data[3 * p + 2]});
  }
  const std::size_t k = std::min(peaks.size() - 1,
                                 static_cast<std::size_t>((1.0 - saturated) * peaks.size()));
  std::nth_element(peaks.begin(), peaks.begin() + static_cast<std::ptrdiff_t>(k), peaks.end());
  degrade::DegradationConfig cfg = shot;
  cfg.exposure_scale = shot.clip_high / std::max(1e-6f, peaks[k]);
  Image sdr = degrade::virtual_shot(hdr, cfg);
  return TrainPair{std::move(hdr), std::move(sdr)};
}

std::vector<TrainPair> synthetic_pairs(int count, int size, std::uint64_t seed,
                                       const degrade::DegradationConfig& shot,
                                       double saturated) {
  if (count <= 0 || size <= 0) throw std::invalid_argument("synthetic_pairs: bad count or size");
  std::vector<TrainPair> out;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    out.push_back(make_pair(synthetic_hdr_scene(size, size, rng), shot, saturated));
  }
  return out;
}

}  // namespace lhdr::train
