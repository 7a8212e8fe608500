// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lhdr/degrade.hpp"
#include "lhdr/image.hpp"
#include "lhdr/kv.hpp"
#include "lhdr/net.hpp"
#include "lhdr/train.hpp"

namespace lhdr::eval {

/// 10 log10(peak^2 / MSE) over all samples; +inf for identical images.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5) at every fully
/// contained position, constants (0.01 peak)^2 and (0.03 peak)^2, averaged
/// over positions and channels.
double ssim(const Image& a, const Image& b, double peak = 1.0);

/// x / (1 + x), then ^(1/2.2), then 8-bit codes (stored as code / 255).
Image tonemap_preview(const Image& hdr);

/// Formats a metric value, writing "inf" for infinities.
std::string format_metric(double v);

struct BenchReport {
  int width = 0;
  int height = 0;
  int repeats = 0;
  int threads = 1;
  double median_seconds = 0.0;
  std::vector<double> samples;

  std::string to_text() const;
  KeyValues to_kv() const;
};

/// Median wall time of lhdr_forward on a random input after one warm-up
/// run. Weights are Kaiming-initialised from `seed`.
BenchReport bench_forward(const net::ModelConfig& cfg, int height, int width, int repeats,
                          std::uint64_t seed = 0);

inline constexpr const char* kMetricDomain = "gamma045";

struct MetricsReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  int mac_width = 1920;
  int mac_height = 1080;
  double runtime_seconds = 0.0;  // 0 when not measured
  int runtime_width = 0;
  int runtime_height = 0;
  int images = 0;
  std::string metric_domain = kMetricDomain;

  std::string to_text() const;
  KeyValues to_kv() const;
};

struct EvalPair {
  Image sdr;  // network input
  Image hdr;  // linear reference
};

/// Mean PSNR and SSIM of the network output against the preprocessed
/// reference, both in the gamma domain: y' = (y / max y)^gamma. Counter
/// fields come from the model's config.
MetricsReport evaluate(const net::Model<float>& model, std::span<const EvalPair> pairs,
                       double gamma = 0.45);

// ---------------------------------------------------------------------------
// Ablations

/// Virtual-shot recipe used in place of the baseline one by the training-set
/// swap: a flatter CRF and no camera colour transform.
degrade::DegradationConfig alternative_shot();

struct AblationConfig {
  net::ModelConfig model;
  train::TrainConfig train;
  degrade::DegradationConfig degradation;
  /// Alternative virtual-shot recipe for the training-set swap.
  degrade::DegradationConfig alt_shot = alternative_shot();
  int train_pairs = 8;
  int test_pairs = 4;
  int image_size = 64;
  std::vector<std::uint64_t> seeds = {1};
  std::uint64_t data_seed = 100;
  /// Which of the four toggles to run besides the baseline.
  bool recipe_swap = true;
  bool no_conventional = true;
  bool no_partial_conv = true;
  bool no_group_conv = true;
};

struct AblationRow {
  std::string name;
  std::int64_t params = 0;
  std::int64_t macs = 0;  // at 1920x1080
  double psnr = 0.0;      // mean over seeds
  double ssim = 0.0;
  std::vector<double> ssim_per_seed;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  const AblationRow& row(std::string_view name) const;
  std::string to_text() const;
  KeyValues to_kv() const;
};

/// Trains the baseline and each toggled configuration under identical seeds
/// and budgets on synthetic pairs, then scores all of them on the same
/// degraded test inputs.
AblationReport ablation_suite(const AblationConfig& cfg);

}  // namespace lhdr::eval
