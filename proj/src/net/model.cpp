// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>

#include "lhdr/net.hpp"

namespace lhdr::net {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("model config: " + what);
}

}  // namespace

void ModelConfig::validate() const {
  require(dense_layers >= 1, "dense_layers must be >= 1");
  require(dense_growth >= 1, "dense_growth must be >= 1");
  require(unet_levels >= 1 && unet_levels <= 6, "unet_levels must be in [1, 6]");
  require(unet_base_channels >= 1, "unet_base_channels must be >= 1");
  require(unet_rb_per_level >= 0, "unet_rb_per_level must be >= 0");
  require(unet_bottleneck_rbs >= 0, "unet_bottleneck_rbs must be >= 0");
  require(groups >= 1 && unet_base_channels % groups == 0,
          "groups must divide unet_base_channels");
  require(global_mlp_channels >= 1, "global_mlp_channels must be >= 1");
  require(global_mlp_layers >= 2, "global_mlp_layers must be >= 2");
  require(modulation_after >= 1 && modulation_after < global_mlp_layers,
          "modulation_after must be in [1, global_mlp_layers)");
  require(modulation_channels >= 1, "modulation_channels must be >= 1");
  require(sft_cond_channels >= 1, "sft_cond_channels must be >= 1");
  require(mask_threshold > 0.0 && mask_threshold < 1.0,
          "mask_threshold must lie in (0, 1)");
  require(leaky_slope > 0.0 && leaky_slope < 1.0, "leaky_slope must lie in (0, 1)");
}

KeyValues ModelConfig::to_kv() const {
  KeyValues kv;
  kv.set("dense_layers", dense_layers);
  kv.set("dense_growth", dense_growth);
  kv.set("unet_levels", unet_levels);
  kv.set("unet_base_channels", unet_base_channels);
  kv.set("unet_rb_per_level", unet_rb_per_level);
  kv.set("unet_bottleneck_rbs", unet_bottleneck_rbs);
  kv.set("groups", groups);
  kv.set("global_mlp_channels", global_mlp_channels);
  kv.set("global_mlp_layers", global_mlp_layers);
  kv.set("modulation_after", modulation_after);
  kv.set("modulation_channels", modulation_channels);
  kv.set("sft_cond_channels", sft_cond_channels);
  kv.set("mask_threshold", mask_threshold);
  kv.set("leaky_slope", leaky_slope);
  kv.set("use_partial_conv", use_partial_conv);
  return kv;
}

ModelConfig ModelConfig::from_kv(const KeyValues& kv, bool allow_unknown) {
  if (!allow_unknown) {
    kv.require_known({"dense_layers", "dense_growth", "unet_levels", "unet_base_channels",
                      "unet_rb_per_level", "unet_bottleneck_rbs", "groups",
                      "global_mlp_channels", "global_mlp_layers", "modulation_after",
                      "modulation_channels", "sft_cond_channels", "mask_threshold",
                      "leaky_slope", "use_partial_conv"});
  }
  ModelConfig cfg;
  auto read_int = [&](std::string_view key, int& field) {
    if (kv.has(key)) field = static_cast<int>(kv.get_int(key));
  };
  read_int("dense_layers", cfg.dense_layers);
  read_int("dense_growth", cfg.dense_growth);
  read_int("unet_levels", cfg.unet_levels);
  read_int("unet_base_channels", cfg.unet_base_channels);
  read_int("unet_rb_per_level", cfg.unet_rb_per_level);
  read_int("unet_bottleneck_rbs", cfg.unet_bottleneck_rbs);
  read_int("groups", cfg.groups);
  read_int("global_mlp_channels", cfg.global_mlp_channels);
  read_int("global_mlp_layers", cfg.global_mlp_layers);
  read_int("modulation_after", cfg.modulation_after);
  read_int("modulation_channels", cfg.modulation_channels);
  read_int("sft_cond_channels", cfg.sft_cond_channels);
  if (kv.has("mask_threshold")) cfg.mask_threshold = kv.get_double("mask_threshold");
  if (kv.has("leaky_slope")) cfg.leaky_slope = kv.get_double("leaky_slope");
  if (kv.has("use_partial_conv")) cfg.use_partial_conv = kv.get_bool("use_partial_conv");
  cfg.validate();
  return cfg;
}

std::vector<LayerInfo> layer_inventory(const ModelConfig& cfg) {
  cfg.validate();
  using ops::ConvSpec;
  std::vector<LayerInfo> out;
  auto add = [&](std::string name, ConvSpec spec, int divisor) {
    spec.validate();
    out.push_back(LayerInfo{std::move(name), spec, divisor});
  };

  const int g = cfg.dense_growth;
  for (int i = 0; i < cfg.dense_layers; ++i) {
    add("local.dense." + std::to_string(i), ConvSpec::same(3 + g * i, g, 3), 1);
  }

  const int cs = cfg.sft_cond_channels;
  add("local.cond.0", ConvSpec::same(3, cs, 3), 1);
  add("local.cond.1", ConvSpec::same(cs, cs, 1), 1);

  const int C = cfg.unet_base_channels;
  const int L = cfg.unet_levels;
  auto block = [&](const std::string& name, int c, int divisor, bool sft) {
    add(name + ".conv1", ConvSpec::same(c, c, 3), divisor);
    if (sft) {
      add(name + ".sft_scale", ConvSpec::same(cs, c, 1), divisor);
      add(name + ".sft_shift", ConvSpec::same(cs, c, 1), divisor);
    }
    add(name + ".conv2", ConvSpec::same(c, c, 3, cfg.groups), divisor);
  };
  auto rb_count = [&](int level) {
    return level == L ? cfg.unet_bottleneck_rbs : cfg.unet_rb_per_level;
  };

  add("local.head", ConvSpec::same(3, C, 3), 1);
  for (int l = 0; l <= L; ++l) {
    const int c = C << l;
    if (l > 0) add("local.down" + std::to_string(l), ConvSpec::same(c / 2, c, 3), 1 << l);
    for (int r = 0; r < rb_count(l); ++r) {
      block("local.enc" + std::to_string(l) + ".rb" + std::to_string(r), c, 1 << l,
            !cfg.use_partial_conv);
    }
  }
  for (int l = L - 1; l >= 0; --l) {
    const int c = C << l;
    add("local.up" + std::to_string(l) + ".fuse", ConvSpec::same(3 * c, c, 3), 1 << l);
    for (int r = 0; r < cfg.unet_rb_per_level; ++r) {
      block("local.dec" + std::to_string(l) + ".rb" + std::to_string(r), c, 1 << l, true);
    }
  }
  add("local.fusion", ConvSpec::same(g + C, 3, 1), 1);

  const int M = cfg.global_mlp_channels;
  for (int i = 0; i < cfg.global_mlp_layers; ++i) {
    const int in = i == 0 ? 3 : M;
    const int o = i + 1 == cfg.global_mlp_layers ? 3 : M;
    add("global.mlp." + std::to_string(i), ConvSpec::same(in, o, 1), 1);
  }
  const int mc = cfg.modulation_channels;
  add("global.mod.0", ConvSpec{3, mc, 3, 2, 1, 1}, 1);
  add("global.mod.1", ConvSpec{mc, mc, 3, 2, 1, 1}, 2);
  add("global.mod.2", ConvSpec::same(mc, 2 * M, 1), 4);
  return out;
}

std::int64_t conv_macs(const ops::ConvSpec& spec, int h, int w) {
  return static_cast<std::int64_t>(spec.out_size(h)) * spec.out_size(w) * spec.weight_count();
}

std::vector<LayerCost> layer_costs(const ModelConfig& cfg, int h, int w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("layer_costs: resolution must be positive");
  const int a = cfg.alignment();
  const int ph = (h + a - 1) / a * a;
  const int pw = (w + a - 1) / a * a;
  std::vector<LayerCost> out;
  for (const LayerInfo& info : layer_inventory(cfg)) {
    LayerCost cost;
    cost.name = info.name;
    cost.spec = info.spec;
    // Strided inputs are the ceiling of the halved size, as produced by the
    // preceding stride-2 layer.
    int ih = ph;
    int iw = pw;
    for (int d = info.input_divisor; d > 1; d /= 2) {
      ih = (ih + 1) / 2;
      iw = (iw + 1) / 2;
    }
    cost.out_h = info.spec.out_size(ih);
    cost.out_w = info.spec.out_size(iw);
    cost.params = info.spec.param_count();
    cost.macs = conv_macs(info.spec, ih, iw);
    out.push_back(std::move(cost));
  }
  return out;
}

std::int64_t count_params(const ModelConfig& cfg) {
  std::int64_t total = 0;
  for (const LayerInfo& info : layer_inventory(cfg)) total += info.spec.param_count();
  return total;
}

std::int64_t count_macs(const ModelConfig& cfg, int h, int w) {
  std::int64_t total = 0;
  for (const LayerCost& c : layer_costs(cfg, h, w)) total += c.macs;
  return total;
}

template <typename T>
Model<T>::Model(const ModelConfig& cfg) : cfg_(cfg), layers_(layer_inventory(cfg)) {
  params_.reserve(layers_.size() * 2);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerInfo& info = layers_[i];
    layer_index_.emplace(info.name, i);
    params_.push_back({info.name + ".weight", BasicTensor<T>(info.spec.weight_shape(), true)});
    params_.push_back({info.name + ".bias",
                       BasicTensor<T>(Shape{1, info.spec.out_channels, 1, 1}, true)});
  }
}

template <typename T>
typename Model<T>::LayerRef Model<T>::layer(std::string_view name) const {
  const auto it = layer_index_.find(std::string(name));
  if (it == layer_index_.end()) {
    throw std::out_of_range("model has no layer '" + std::string(name) + "'");
  }
  const std::size_t i = it->second;
  return LayerRef{layers_[i].spec, params_[2 * i].tensor, params_[2 * i + 1].tensor};
}

template <typename T>
BasicTensor<T>& Model<T>::tensor(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return p.tensor;
  }
  throw std::out_of_range("model has no tensor '" + std::string(name) + "'");
}

template <typename T>
bool Model<T>::has_layer(std::string_view name) const {
  return layer_index_.count(std::string(name)) != 0;
}

template <typename T>
std::int64_t Model<T>::parameter_count() const {
  std::int64_t total = 0;
  for (const auto& p : params_) total += static_cast<std::int64_t>(p.tensor.numel());
  return total;
}

template <typename T>
void Model<T>::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

template class Model<float>;
template class Model<double>;

}  // namespace lhdr::net
