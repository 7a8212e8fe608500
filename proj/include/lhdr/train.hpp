// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lhdr/degrade.hpp"
#include "lhdr/image.hpp"
#include "lhdr/kv.hpp"
#include "lhdr/net.hpp"
#include "lhdr/rng.hpp"

namespace lhdr::train {

struct TrainConfig {
  double lr0 = 2e-4;
  double lr_half_every = 2.5e5;
  int batch = 1;
  int patch_size = 64;
  int max_iters = 1000;
  double loss_grad_weight = 0.1;
  double gamma = 0.45;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  /// Apply the conventional degradation chain to every input patch.
  bool degrade_inputs = true;
  /// Per-pair sampling weights; empty means uniform.
  std::vector<double> source_weights;
  std::uint64_t seed = 0;

  void validate() const;
  KeyValues to_kv() const;
  static TrainConfig from_kv(const KeyValues& kv);
};

// ---------------------------------------------------------------------------
// Gamma-domain pre/post-processing

struct Preprocessed {
  Image image;  // (y / max_y)^gamma, tagged nonlinear_hdr
  double max_y = 0.0;
};

/// Throws for an all-zero image.
Preprocessed preprocess_gamma(const Image& hdr, double gamma = 0.45);
/// y'^(1/gamma), tagged linear_hdr. Multiply by max_y to undo the
/// normalisation.
Image postprocess_gamma(const Image& nonlinear, double gamma = 0.45);

// ---------------------------------------------------------------------------
// Loss

template <typename T>
struct LossTerms {
  BasicTensor<T> total;  // scalar, on the tape when one is passed
  double l1 = 0.0;
  double lg = 0.0;
};

/// mean|pred - target| + grad_weight * mean|grad_map(pred) - grad_map(target)|.
template <typename T>
LossTerms<T> lhdr_loss(Tape<T>* tape, const BasicTensor<T>& pred,
                       const BasicTensor<T>& target, double grad_weight = 0.1);

// ---------------------------------------------------------------------------
// Initialisation and optimisation

/// Weights ~ N(0, 2 / fan_in) with fan_in = (in/groups) * k * k; biases 0.
template <typename T>
void kaiming_init(net::Model<T>& model, Rng& rng);

struct OptimState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

OptimState make_optim_state(const TrainConfig& cfg);

/// One bias-corrected Adam update from the gradients held by the model's
/// parameters (absent gradients count as zero). Throws std::runtime_error
/// naming the parameter if a gradient is not finite.
template <typename T>
void adam_step(net::Model<T>& model, OptimState& state, double lr);

/// lr0 * 0.5^floor(iter / lr_half_every).
double lr_schedule(std::int64_t iter, const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// Data

struct TrainPair {
  Image hdr;  // linear
  Image sdr;  // clean nonlinear SDR
};

/// Smooth linear HDR scene with a sky gradient, shaded shapes, texture and
/// a few small emitters far above diffuse white.
Image synthetic_hdr_scene(int width, int height, Rng& rng);

/// Pairs an HDR image with its virtual shot under `shot`, with the exposure
/// chosen so that roughly `saturated` of the pixels clip.
TrainPair make_pair(Image hdr, const degrade::DegradationConfig& shot, double saturated = 0.05);

/// `count` scenes with SDR counterparts from the virtual shot of `shot`.
/// Exposure is set per scene so that roughly `saturated` of the pixels clip.
std::vector<TrainPair> synthetic_pairs(int count, int size, std::uint64_t seed,
                                       const degrade::DegradationConfig& shot,
                                       double saturated = 0.05);

// ---------------------------------------------------------------------------
// Loop

struct LossRecord {
  std::int64_t iter = 0;
  double lr = 0.0;
  double l1 = 0.0;
  double lg = 0.0;
  double total = 0.0;
};

std::string format_loss_line(const LossRecord& r);

struct TrainResult {
  net::Model<float> model;
  std::vector<LossRecord> log;
};

using IterationCallback = std::function<void(const LossRecord&)>;

/// Kaiming-initialises a model (or continues from `init`) and runs
/// max_iters steps: sample pairs, crop aligned patches, optionally degrade
/// the SDR patch, forward, loss against the preprocessed HDR, backward,
/// Adam. Throws std::runtime_error on a non-finite loss, naming the
/// iteration.
TrainResult train_loop(const net::ModelConfig& model_cfg, const TrainConfig& cfg,
                       const degrade::DegradationConfig& degradation,
                       std::span<const TrainPair> data,
                       const net::Model<float>* init = nullptr,
                       const IterationCallback& on_iter = {});

/// Mean loss over whole pairs without degradation, for monitoring.
LossRecord evaluate_loss(const net::Model<float>& model, std::span<const TrainPair> data,
                         const TrainConfig& cfg);

}  // namespace lhdr::train
