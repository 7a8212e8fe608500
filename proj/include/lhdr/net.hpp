// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lhdr/image.hpp"
#include "lhdr/kv.hpp"
#include "lhdr/ops.hpp"
#include "lhdr/tensor.hpp"

namespace lhdr::net {

/// Architecture hyperparameters of the two-step network. The defaults give
/// 233,238 parameters and 149.68G MACs at 1920x1080.
struct ModelConfig {
  int dense_layers = 5;
  int dense_growth = 16;
  int unet_levels = 2;
  int unet_base_channels = 16;
  int unet_rb_per_level = 1;
  int unet_bottleneck_rbs = 2;
  int groups = 4;
  int global_mlp_channels = 64;
  int global_mlp_layers = 4;
  /// The channel modulation is applied after this many MLP layers.
  int modulation_after = 2;
  int modulation_channels = 32;
  int sft_cond_channels = 32;
  double mask_threshold = 0.9;
  double leaky_slope = 0.2;
  /// false swaps the encoder's partial-conv residual blocks for SFT blocks.
  bool use_partial_conv = true;

  void validate() const;
  KeyValues to_kv() const;
  /// Reads every known key present in `kv`; unknown keys are errors unless
  /// `allow_unknown` is set.
  static ModelConfig from_kv(const KeyValues& kv, bool allow_unknown = false);

  /// Spatial dims are padded to a multiple of this before the forward pass.
  int alignment() const { return 1 << unet_levels; }

  bool operator==(const ModelConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Soft masks

/// max(0, (p - t) / (1 - t)), p clamped to [0, 1].
double bright_valid(double p, double t);
/// min((p - 1) / (t - 1), 1), p clamped to [0, 1].
double bright_invalid(double p, double t);

template <typename T>
struct MaskPair {
  BasicTensor<T> bright_valid;    // (n, 1, h, w)
  BasicTensor<T> bright_invalid;  // (n, 1, h, w)
};

/// Reduces the prior to one channel by the per-pixel maximum and evaluates
/// both masks.
template <typename T>
MaskPair<T> make_masks(const BasicTensor<T>& prior, double t);

// ---------------------------------------------------------------------------
// Modulation and masked convolution

/// alpha[c] * x + beta[c]; alpha and beta have dims (n, c, 1, 1).
template <typename T>
BasicTensor<T> channel_modulation(Tape<T>* tape, const BasicTensor<T>& x,
                                  const BasicTensor<T>& alpha,
                                  const BasicTensor<T>& beta);

/// alpha * x + beta elementwise; all three share dims.
template <typename T>
BasicTensor<T> sft_modulation(Tape<T>* tape, const BasicTensor<T>& x,
                              const BasicTensor<T>& alpha,
                              const BasicTensor<T>& beta);

template <typename T>
struct MaskedFeatures {
  BasicTensor<T> features;
  BasicTensor<T> mask;  // (n, 1, h', w'), 1 where the window saw valid pixels
};

/// Convolution over x * mask, renormalised per window by
/// (in-bounds window area) / (window mask sum); windows with zero mask sum
/// produce the bias alone. The mask is a constant for differentiation.
template <typename T>
MaskedFeatures<T> partial_conv(Tape<T>* tape, const BasicTensor<T>& x,
                               const BasicTensor<T>& mask,
                               const ops::ConvSpec& spec,
                               const BasicTensor<T>& weight,
                               const BasicTensor<T>& bias);

// ---------------------------------------------------------------------------
// Layer inventory and overhead counters

struct LayerInfo {
  std::string name;
  ops::ConvSpec spec;
  int input_divisor = 1;  // input spatial size = padded size / divisor
};

std::vector<LayerInfo> layer_inventory(const ModelConfig& cfg);

struct LayerCost {
  std::string name;
  ops::ConvSpec spec;
  int out_h = 0;
  int out_w = 0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
};

/// out_h * out_w * weight count for one convolution over an h x w input.
std::int64_t conv_macs(const ops::ConvSpec& spec, int h, int w);

/// Per-layer cost at an h x w input (padded to cfg.alignment()).
std::vector<LayerCost> layer_costs(const ModelConfig& cfg, int h, int w);
std::int64_t count_params(const ModelConfig& cfg);
std::int64_t count_macs(const ModelConfig& cfg, int h, int w);

// ---------------------------------------------------------------------------
// Model

template <typename T>
struct NamedTensor {
  std::string name;
  BasicTensor<T> tensor;
};

template <typename T>
class Model {
 public:
  /// Zero-initialised weights, all marked requires_grad.
  explicit Model(const ModelConfig& cfg);

  const ModelConfig& config() const { return cfg_; }
  std::vector<NamedTensor<T>>& parameters() { return params_; }
  const std::vector<NamedTensor<T>>& parameters() const { return params_; }

  struct LayerRef {
    const ops::ConvSpec& spec;
    const BasicTensor<T>& weight;
    const BasicTensor<T>& bias;
  };
  LayerRef layer(std::string_view name) const;
  BasicTensor<T>& tensor(std::string_view name);
  bool has_layer(std::string_view name) const;

  std::int64_t parameter_count() const;
  void zero_grad();

  template <typename U>
  Model<U> cast() const {
    Model<U> out(cfg_);
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const auto src = params_[i].tensor.data();
      auto dst = out.parameters()[i].tensor.data();
      for (std::size_t j = 0; j < src.size(); ++j) dst[j] = static_cast<U>(src[j]);
    }
    return out;
  }

 private:
  ModelConfig cfg_;
  std::vector<LayerInfo> layers_;
  std::vector<NamedTensor<T>> params_;  // weight then bias, per layer
  std::unordered_map<std::string, std::size_t> layer_index_;
};

// ---------------------------------------------------------------------------
// Forward passes. All take an optional tape; pass nullptr for inference.

/// Pointwise MLP with prior-driven channel modulation; final ReLU.
template <typename T>
BasicTensor<T> global_net_forward(Tape<T>* tape, const Model<T>& model,
                                  const BasicTensor<T>& x,
                                  const BasicTensor<T>& prior);

template <typename T>
struct EncoderOutput {
  std::vector<BasicTensor<T>> skips;  // one per level above the bottleneck
  BasicTensor<T> bottleneck;
};

/// Encoder half of the large-scale branch. Input dims must be aligned.
/// `conditions` are the SFT condition features per level (only read when
/// partial convolution is disabled).
template <typename T>
EncoderOutput<T> encoder_forward(Tape<T>* tape, const Model<T>& model,
                                 const BasicTensor<T>& x,
                                 const BasicTensor<T>& bright_invalid,
                                 const std::vector<BasicTensor<T>>& conditions);

/// SFT condition features per level, computed from prior * bright_valid.
template <typename T>
std::vector<BasicTensor<T>> sft_conditions(Tape<T>* tape, const Model<T>& model,
                                           const BasicTensor<T>& prior,
                                           const BasicTensor<T>& bright_valid);

/// Dense branch plus masked encoder-decoder, fused to 3 channels. Pads
/// unaligned inputs by reflection and crops the result.
template <typename T>
BasicTensor<T> local_net_forward(Tape<T>* tape, const Model<T>& model,
                                 const BasicTensor<T>& x,
                                 const BasicTensor<T>& prior);

/// global(local(sdr, sdr), sdr): the gamma-domain HDR estimate.
template <typename T>
BasicTensor<T> lhdr_forward(Tape<T>* tape, const Model<T>& model,
                            const BasicTensor<T>& sdr);

/// Inference on an image; the result is tagged nonlinear_hdr.
Image lhdr_forward(const Model<float>& model, const Image& sdr);

}  // namespace lhdr::net
