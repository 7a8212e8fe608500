// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lhdr/degrade.hpp"

namespace lhdr::degrade {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("degradation config: " + what);
}

std::string join(std::initializer_list<double> values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ", ";
    out += format_double(v);
  }
  return out;
}

std::pair<double, double> read_range(const KeyValues& kv, std::string_view key) {
  const auto v = kv.get_doubles(key);
  if (v.size() == 1) return {v[0], v[0]};
  if (v.size() != 2) {
    throw ParseError(std::string(key) + " needs one value or a 'lo, hi' pair");
  }
  return {v[0], v[1]};
}

int as_int(double v, std::string_view key) {
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ParseError(std::string(key) + " must hold integers");
  }
  return static_cast<int>(v);
}

}  // namespace

void DegradationConfig::validate() const {
  require(std::isfinite(exposure_scale) && exposure_scale > 0, "exposure_scale must be positive");
  require(std::isfinite(crf_gamma) && crf_gamma > 0, "crf_gamma must be positive");
  require(clip_low >= 0 && clip_high <= 1 && clip_low < clip_high,
          "clip bounds must satisfy 0 <= clip_low < clip_high <= 1");
  require(quant_bits >= 1 && quant_bits <= 16, "quant_bits must lie in [1, 16]");
  require(noise_sigma_range.first >= 0 && noise_sigma_range.first <= noise_sigma_range.second,
          "noise_sigma_range must be a non-negative lo <= hi pair");
  require(jpeg_qf1_range.first >= 1 && jpeg_qf1_range.second <= 100 &&
              jpeg_qf1_range.first <= jpeg_qf1_range.second,
          "jpeg_qf1_range must lie in [1, 100]");
  require(jpeg_qf2 >= 1 && jpeg_qf2 <= 100, "jpeg_qf2 must lie in [1, 100]");
  require(rescale_range.first > 0 && rescale_range.second <= 1 &&
              rescale_range.first <= rescale_range.second,
          "rescale_range must lie in (0, 1]");
  require(std::abs(determinant(cst_matrix)) > 1e-9, "cst_matrix must be invertible");
}

KeyValues DegradationConfig::to_kv() const {
  KeyValues kv;
  kv.set("exposure_scale", exposure_scale);
  kv.set("crf_gamma", crf_gamma);
  kv.set("clip_low", clip_low);
  kv.set("clip_high", clip_high);
  kv.set("quant_bits", quant_bits);
  kv.set("noise_sigma_range", join({noise_sigma_range.first, noise_sigma_range.second}));
  kv.set("jpeg_qf1_range", join({static_cast<double>(jpeg_qf1_range.first),
                                 static_cast<double>(jpeg_qf1_range.second)}));
  kv.set("jpeg_qf2", jpeg_qf2);
  kv.set("rescale_range", join({rescale_range.first, rescale_range.second}));
  const Mat3& m = cst_matrix;
  kv.set("cst_matrix", join({m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8]}));
  kv.set("seed", static_cast<long long>(seed));
  return kv;
}

DegradationConfig DegradationConfig::from_kv(const KeyValues& kv) {
  kv.require_known({"exposure_scale", "crf_gamma", "clip_low", "clip_high", "quant_bits",
                    "noise_sigma_range", "jpeg_qf1_range", "jpeg_qf2", "rescale_range",
                    "cst_matrix", "seed"});
  DegradationConfig cfg;
  if (kv.has("exposure_scale")) cfg.exposure_scale = kv.get_double("exposure_scale");
  if (kv.has("crf_gamma")) cfg.crf_gamma = kv.get_double("crf_gamma");
  if (kv.has("clip_low")) cfg.clip_low = kv.get_double("clip_low");
  if (kv.has("clip_high")) cfg.clip_high = kv.get_double("clip_high");
  if (kv.has("quant_bits")) cfg.quant_bits = static_cast<int>(kv.get_int("quant_bits"));
  if (kv.has("noise_sigma_range")) cfg.noise_sigma_range = read_range(kv, "noise_sigma_range");
  if (kv.has("jpeg_qf1_range")) {
    const auto r = read_range(kv, "jpeg_qf1_range");
    cfg.jpeg_qf1_range = {as_int(r.first, "jpeg_qf1_range"), as_int(r.second, "jpeg_qf1_range")};
  }
  if (kv.has("jpeg_qf2")) cfg.jpeg_qf2 = static_cast<int>(kv.get_int("jpeg_qf2"));
  if (kv.has("rescale_range")) cfg.rescale_range = read_range(kv, "rescale_range");
  if (kv.has("cst_matrix")) {
    const auto v = kv.get_doubles("cst_matrix");
    if (v.size() != 9) throw ParseError("cst_matrix needs 9 comma-separated values");
    std::copy(v.begin(), v.end(), cfg.cst_matrix.begin());
  }
  if (kv.has("seed")) {
    const long long s = kv.get_int("seed");
    if (s < 0) throw ParseError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  cfg.validate();
  return cfg;
}

DegradationConfig DegradationConfig::load(const std::filesystem::path& path) {
  return from_kv(KeyValues::load(path));
}

KeyValues ConventionalParams::to_kv() const {
  KeyValues kv;
  kv.set("sigma", sigma);
  kv.set("qf1", qf1);
  kv.set("qf2", qf2);
  kv.set("scale", scale);
  kv.set("scaled_width", scaled_width);
  kv.set("scaled_height", scaled_height);
  return kv;
}

Degraded conventional_degrade(const Image& sdr, const DegradationConfig& cfg, Rng& rng,
                              const StageObserver& observer) {
  cfg.validate();
  sdr.validate();
  auto emit = [&](std::string_view stage, const Image& img) {
    if (observer) observer(stage, img);
  };

  ConventionalParams p;
  p.sigma = rng.uniform(cfg.noise_sigma_range.first, cfg.noise_sigma_range.second);
  p.qf1 = rng.uniform_int(cfg.jpeg_qf1_range.first, cfg.jpeg_qf1_range.second);
  p.qf2 = cfg.jpeg_qf2;
  p.scale = rng.uniform(cfg.rescale_range.first, cfg.rescale_range.second);
  p.scaled_width = std::max(1, static_cast<int>(std::lround(sdr.width * p.scale)));
  p.scaled_height = std::max(1, static_cast<int>(std::lround(sdr.height * p.scale)));

  Image img = srgb_decode(sdr);
  emit("srgb_decode", img);
  img = cst_apply(img, inverse(cfg.cst_matrix));
  emit("to_camera_rgb", img);
  img = add_camera_noise(img, p.sigma, rng);
  emit("camera_noise", img);
  img = cst_apply(img, cfg.cst_matrix);
  emit("from_camera_rgb", img);
  img = srgb_encode(img);
  emit("srgb_encode", img);
  img = jpeg_sim(img, p.qf1);
  emit("jpeg_first", img);
  img = resize_bilinear(img, p.scaled_width, p.scaled_height);
  emit("rescale", img);
  img = jpeg_sim(img, p.qf2);
  emit("jpeg_second", img);
  img = resize_bilinear(img, sdr.width, sdr.height);
  emit("rescale_back", img);
  return Degraded{std::move(img), p};
}

}  // namespace lhdr::degrade
