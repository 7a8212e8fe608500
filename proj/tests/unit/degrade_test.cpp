// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lhdr/degrade.hpp"
#include "lhdr/eval.hpp"

namespace lhdr::degrade {
namespace {

Image random_image(int w, int h, Domain d, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Image img(w, h, d);
  for (float& v : img.data) v = static_cast<float>(rng.uniform(lo, hi));
  return img;
}

// Smooth colourful test image without clipping.
Image smooth_image(int w, int h) {
  Image img(w, h, Domain::nonlinear_sdr);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      img.at(x, y, 0) = static_cast<float>(0.5 + 0.3 * std::sin(x * 0.07) * std::cos(y * 0.05));
      img.at(x, y, 1) = static_cast<float>(0.45 + 0.25 * std::cos(x * 0.04 + y * 0.03));
      img.at(x, y, 2) = static_cast<float>(0.4 + 0.2 * std::sin((x + y) * 0.06));
    }
  return img;
}

DegradationConfig near_identity() {
  DegradationConfig cfg;
  cfg.noise_sigma_range = {0.0, 0.0};
  cfg.jpeg_qf1_range = {100, 100};
  cfg.jpeg_qf2 = 100;
  cfg.rescale_range = {1.0, 1.0};
  return cfg;
}

TEST(DegradationConfig, Defaults) {
  const DegradationConfig cfg;
  EXPECT_EQ(cfg.noise_sigma_range, (std::pair{0.001, 0.003}));
  EXPECT_EQ(cfg.jpeg_qf1_range, (std::pair{60, 80}));
  EXPECT_EQ(cfg.jpeg_qf2, 75);
  EXPECT_NE(determinant(cfg.cst_matrix), 0.0);
}

TEST(DegradationConfig, KeyValueRoundtripAndErrors) {
  DegradationConfig cfg;
  cfg.noise_sigma_range = {0.002, 0.002};
  cfg.seed = 9;
  cfg.cst_matrix = kIdentity;
  const DegradationConfig back = DegradationConfig::from_kv(cfg.to_kv());
  EXPECT_EQ(back.noise_sigma_range, cfg.noise_sigma_range);
  EXPECT_EQ(back.seed, 9u);
  EXPECT_EQ(back.cst_matrix, kIdentity);
  KeyValues kv;
  kv.set("jpeg_qf3", 10);
  EXPECT_THROW(DegradationConfig::from_kv(kv), ParseError);
  kv = KeyValues{};
  kv.set("cst_matrix", std::string("1, 2, 3, 2, 4, 6, 0, 0, 1"));
  EXPECT_THROW(DegradationConfig::from_kv(kv), std::invalid_argument);
}

TEST(Color, SrgbExamples) {
  Image img(3, 1, Domain::linear_hdr);
  img.data = {0, 0, 0, 1, 1, 1, 0.25f, 0.25f, 0.25f};
  const Image enc = srgb_encode(img);
  EXPECT_EQ(enc.data[0], 0.0f);
  EXPECT_EQ(enc.data[3], 1.0f);
  EXPECT_NEAR(enc.data[6], 0.5325, 1e-4);
  EXPECT_NEAR(srgb_decode(enc).data[6], 0.25, 1e-6);
}

TEST(Color, CstExamples) {
  Rng rng(1);
  const Image img = random_image(8, 5, Domain::linear_hdr, rng);
  EXPECT_EQ(cst_apply(img, kIdentity).data, img.data);
  const Image swapped = cst_apply(img, Mat3{0, 0, 1, 0, 1, 0, 1, 0, 0});
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    EXPECT_EQ(swapped.data[3 * i], img.data[3 * i + 2]);
    EXPECT_EQ(swapped.data[3 * i + 2], img.data[3 * i]);
  }
  const Image back = cst_apply(cst_apply(img, kDefaultCameraMatrix), inverse(kDefaultCameraMatrix));
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(back.data[i], img.data[i], 1e-5);
  EXPECT_THROW(inverse(Mat3{1, 2, 3, 2, 4, 6, 0, 0, 1}), std::invalid_argument);
}

TEST(Noise, ZeroSigmaIsIdentity) {
  Rng rng(2);
  const Image img = random_image(6, 6, Domain::linear_hdr, rng);
  Rng r(3);
  EXPECT_EQ(add_camera_noise(img, 0.0, r).data, img.data);
}

TEST(Noise, MonteCarloMean) {
  const double sigma = 0.003;
  Image img(1000, 1000, Domain::linear_hdr, 0.5f);
  Rng rng(4);
  const Image noisy = add_camera_noise(img, sigma, rng);
  double sum = 0;
  for (std::size_t i = 0; i < noisy.pixel_count(); ++i) sum += noisy.data[3 * i];
  const double mean = sum / 1e6;
  const double sd = std::sqrt(sigma * sigma * 0.5 + sigma * sigma);
  EXPECT_NEAR(mean, 0.5, 3 * sd / 1000);
  // Variance follows sigma^2 x + sigma^2.
  double var = 0;
  for (std::size_t i = 0; i < noisy.pixel_count(); ++i) var += std::pow(noisy.data[3 * i] - mean, 2);
  EXPECT_NEAR(var / 1e6, sd * sd, 0.05 * sd * sd);
}

TEST(Noise, SameSeedSameNoise) {
  Image img(16, 16, Domain::linear_hdr, 0.3f);
  Rng a(5);
  Rng b(5);
  EXPECT_EQ(add_camera_noise(img, 0.002, a).data, add_camera_noise(img, 0.002, b).data);
}

TEST(Jpeg, ConstantImageWithinOneDcStep) {
  for (int qf : {10, 50, 75, 95}) {
    Image img(16, 16, Domain::nonlinear_sdr, 0.37f);
    const Image out = jpeg_sim(img, qf);
    const double step = jpeg_quant_table(qf, false)[0] / 255.0 / 8.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      EXPECT_LE(std::abs(out.data[i] - img.data[i]), step + 1e-6) << qf;
    }
  }
}

TEST(Jpeg, HighQualityNearLossless) {
  const Image img = smooth_image(64, 48);
  EXPECT_GT(eval::psnr(jpeg_sim(img, 100), img), 45.0);
}

TEST(Jpeg, LowerQualityLosesMore) {
  Rng rng(6);
  Image img = smooth_image(64, 64);
  for (float& v : img.data) v = std::clamp(v + static_cast<float>(rng.uniform(-0.05, 0.05)), 0.0f, 1.0f);
  EXPECT_GT(eval::psnr(jpeg_sim(img, 90), img), eval::psnr(jpeg_sim(img, 30), img));
}

TEST(Jpeg, IdempotentOnRoundtrippedBlocks) {
  const Image once = jpeg_sim(smooth_image(64, 32), 75);
  const Image twice = jpeg_sim(once, 75);
  for (std::size_t i = 0; i < once.data.size(); ++i) {
    const float ulp = std::nextafter(std::abs(once.data[i]), 2.0f) - std::abs(once.data[i]);
    EXPECT_LE(std::abs(twice.data[i] - once.data[i]), ulp) << i;
  }
}

TEST(Jpeg, QuantTables) {
  EXPECT_EQ(jpeg_quant_table(50, false)[0], 16);
  EXPECT_EQ(jpeg_quant_table(100, false)[0], 1);
  EXPECT_EQ(jpeg_quant_table(50, true)[63], 99);
  EXPECT_THROW(jpeg_quant_table(0, false), std::invalid_argument);
  EXPECT_THROW(jpeg_sim(smooth_image(8, 8), 101), std::invalid_argument);
}

TEST(Jpeg, OddDimensions) {
  const Image img = smooth_image(13, 7);
  const Image out = jpeg_sim(img, 80);
  EXPECT_EQ(out.width, 13);
  EXPECT_EQ(out.height, 7);
  EXPECT_GT(eval::psnr(out, img), 30.0);
}

TEST(Resize, IdentityAndConstant) {
  const Image img = smooth_image(10, 6);
  EXPECT_EQ(resize_bilinear(img, 10, 6).data, img.data);
  Image c(9, 9, Domain::nonlinear_sdr, 0.25f);
  for (float v : resize_bilinear(c, 5, 7).data) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(VirtualShot, Examples) {
  DegradationConfig cfg;
  cfg.cst_matrix = kIdentity;
  cfg.exposure_scale = 4.0;
  Image hdr(2, 1, Domain::linear_hdr);
  hdr.data = {0.25f, 0.25f, 0.25f, 1.0f, 1.0f, 1.0f};
  const Image sdr = virtual_shot(hdr, cfg);
  EXPECT_EQ(sdr.domain, Domain::nonlinear_sdr);
  EXPECT_EQ(sdr.data[0], 1.0f);
  EXPECT_EQ(sdr.data[3], 1.0f);
}

TEST(VirtualShot, RampSaturationFraction) {
  DegradationConfig cfg;
  cfg.cst_matrix = kIdentity;
  const int n = 1000;
  Image hdr(n, 1, Domain::linear_hdr);
  // 10% of pixels exceed the clip point 1.0.
  for (int x = 0; x < n; ++x)
    for (int c = 0; c < 3; ++c) hdr.at(x, 0, c) = static_cast<float>((x + 0.5) / (0.9 * n));
  const Image sdr = virtual_shot(hdr, cfg);
  const double over = exposure_stats(sdr).over_fraction;
  // One bucket of codes at the top of the ramp maps onto code 255 as well.
  const double bucket = 1.0 - std::pow(254.5 / 255.0, 2.2);
  EXPECT_NEAR(over, 0.10, bucket * 0.9 + 1.0 / n);
}

TEST(VirtualShot, Monotone) {
  DegradationConfig cfg;
  cfg.cst_matrix = kIdentity;
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    Image a(1, 1, Domain::linear_hdr);
    for (float& v : a.data) v = static_cast<float>(std::exp(rng.uniform(-8, 2)));
    Image b = a;
    for (float& v : b.data) v *= static_cast<float>(rng.uniform(1.0, 3.0));
    const Image sa = virtual_shot(a, cfg);
    const Image sb = virtual_shot(b, cfg);
    for (int c = 0; c < 3; ++c) ASSERT_LE(sa.data[c], sb.data[c]);
  }
}

TEST(VirtualShot, QuantisedToCodes) {
  Rng rng(8);
  const Image hdr = random_image(16, 16, Domain::linear_hdr, rng, 0.0, 2.0);
  for (float v : virtual_shot(hdr, DegradationConfig{}).data) {
    EXPECT_NEAR(v * 255.0, std::round(v * 255.0), 1e-3);
  }
}

TEST(Conventional, NearIdentityChain) {
  const Image sdr = smooth_image(64, 64);
  Rng rng(9);
  const Degraded d = conventional_degrade(sdr, near_identity(), rng);
  EXPECT_GT(eval::psnr(d.image, sdr), 40.0);
  EXPECT_EQ(d.params.sigma, 0.0);
  EXPECT_EQ(d.params.qf1, 100);
}

TEST(Conventional, DefaultsAreLossyAndDeterministic) {
  const Image sdr = smooth_image(64, 64);
  Rng a(10);
  Rng b(10);
  const Degraded da = conventional_degrade(sdr, DegradationConfig{}, a);
  const Degraded db = conventional_degrade(sdr, DegradationConfig{}, b);
  EXPECT_EQ(da.image.data, db.image.data);
  EXPECT_LT(eval::psnr(da.image, sdr), 50.0);
  EXPECT_EQ(da.image.width, 64);
  EXPECT_EQ(da.image.height, 64);
  EXPECT_GE(da.params.sigma, 0.001);
  EXPECT_LE(da.params.sigma, 0.003);
  EXPECT_GE(da.params.qf1, 60);
  EXPECT_LE(da.params.qf1, 80);
  EXPECT_EQ(da.params.qf2, 75);
  EXPECT_GE(da.params.scale, 0.7);
  EXPECT_LE(da.params.scale, 1.0);
  for (float v : da.image.data) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(Conventional, StageOrder) {
  std::vector<std::string> stages;
  Rng rng(11);
  conventional_degrade(smooth_image(32, 32), DegradationConfig{}, rng,
                       [&](std::string_view s, const Image&) { stages.emplace_back(s); });
  const std::vector<std::string> want = {"srgb_decode",  "to_camera_rgb", "camera_noise",
                                         "from_camera_rgb", "srgb_encode", "jpeg_first",
                                         "rescale",      "jpeg_second",  "rescale_back"};
  EXPECT_EQ(stages, want);
}

TEST(Conventional, NoiseOnlyInCameraStage) {
  DegradationConfig cfg = near_identity();
  cfg.noise_sigma_range = {0.003, 0.003};
  const Image sdr = smooth_image(32, 32);
  std::vector<std::pair<std::string, Image>> seen;
  Rng rng(12);
  conventional_degrade(sdr, cfg, rng, [&](std::string_view s, const Image& img) {
    seen.emplace_back(std::string(s), img);
  });
  Rng clean_rng(12);
  std::vector<std::pair<std::string, Image>> clean;
  conventional_degrade(sdr, near_identity(), clean_rng, [&](std::string_view s, const Image& img) {
    clean.emplace_back(std::string(s), img);
  });
  ASSERT_EQ(seen.size(), clean.size());
  EXPECT_EQ(seen[1].second.data, clean[1].second.data);
  EXPECT_NE(seen[2].second.data, clean[2].second.data);
}

TEST(Exposure, Examples) {
  Image img(100, 100, Domain::nonlinear_sdr, 0.5f);
  for (int i = 0; i < 500; ++i) img.at(i % 100, i / 100, 1) = 1.0f;
  const ExposureStats s = exposure_stats(img);
  EXPECT_DOUBLE_EQ(s.over_fraction, 0.05);
  EXPECT_DOUBLE_EQ(s.under_fraction, 0.0);
  const ExposureStats gray = exposure_stats(Image(10, 10, Domain::nonlinear_sdr, 0.5f));
  EXPECT_EQ(gray.over_fraction, 0.0);
  EXPECT_EQ(gray.under_fraction, 0.0);
}

TEST(Exposure, Threshold248) {
  Image img(10, 10, Domain::nonlinear_sdr, 0.5f);
  const int codes[] = {247, 248, 250, 255};
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) img.at(i, 0, c) = codes[i] / 255.0f;
  }
  EXPECT_DOUBLE_EQ(exposure_stats(img, 248).over_fraction, 0.03);
  EXPECT_DOUBLE_EQ(exposure_stats(img, 255).over_fraction, 0.01);
  Image dark(4, 1, Domain::nonlinear_sdr, 0.0f);
  dark.at(3, 0, 0) = 0.5f;
  EXPECT_DOUBLE_EQ(exposure_stats(dark).under_fraction, 0.75);
}

}  // namespace
}  // namespace lhdr::degrade
