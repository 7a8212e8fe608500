// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>
#include <string>

#include "lhdr/net.hpp"

namespace lhdr::net {

namespace {

template <typename T>
class Runner {
 public:
  Runner(Tape<T>* tape, const Model<T>& model)
      : tape_(tape), model_(model), cfg_(model.config()) {}

  BasicTensor<T> conv(const std::string& name, const BasicTensor<T>& x) const {
    const auto layer = model_.layer(name);
    return ops::conv2d(tape_, x, layer.spec, layer.weight, layer.bias);
  }

  MaskedFeatures<T> pconv(const std::string& name, const BasicTensor<T>& x,
                          const BasicTensor<T>& mask) const {
    const auto layer = model_.layer(name);
    return partial_conv(tape_, x, mask, layer.spec, layer.weight, layer.bias);
  }

  BasicTensor<T> leaky(const BasicTensor<T>& x) const {
    return ops::leaky_relu(tape_, x, cfg_.leaky_slope);
  }

  MaskedFeatures<T> pconv_block(const std::string& name, const BasicTensor<T>& x,
                                const BasicTensor<T>& mask) const {
    auto first = pconv(name + ".conv1", x, mask);
    auto second = pconv(name + ".conv2", leaky(first.features), first.mask);
    return {ops::add(tape_, x, second.features), second.mask};
  }

  BasicTensor<T> sft_block(const std::string& name, const BasicTensor<T>& x,
                           const BasicTensor<T>& cond) const {
    const BasicTensor<T> h = conv(name + ".conv1", x);
    const BasicTensor<T> alpha = ops::add_scalar(tape_, conv(name + ".sft_scale", cond), 1.0);
    const BasicTensor<T> beta = conv(name + ".sft_shift", cond);
    const BasicTensor<T> mod = leaky(sft_modulation(tape_, h, alpha, beta));
    return ops::add(tape_, x, conv(name + ".conv2", mod));
  }

  int rb_count(int level) const {
    return level == cfg_.unet_levels ? cfg_.unet_bottleneck_rbs : cfg_.unet_rb_per_level;
  }

  Tape<T>* tape() const { return tape_; }
  const ModelConfig& cfg() const { return cfg_; }

 private:
  Tape<T>* tape_;
  const Model<T>& model_;
  const ModelConfig& cfg_;
};

void check_input(const Shape& x, const Shape& prior, const char* who) {
  if (x.c != 3 || prior.c != 3 || x.n != prior.n || x.h != prior.h || x.w != prior.w) {
    throw std::invalid_argument(std::string(who) + ": input " + x.str() +
                                " and prior " + prior.str() +
                                " must be 3-channel with equal dims");
  }
}

template <typename T>
BasicTensor<T> pad_to(Tape<T>* tape, const BasicTensor<T>& x, int a) {
  const int bottom = (a - x.h() % a) % a;
  const int right = (a - x.w() % a) % a;
  if (bottom == 0 && right == 0) return x;
  return ops::pad_reflect(tape, x, bottom, right);
}

template <typename T>
BasicTensor<T> local_aligned(Tape<T>* tape, const Model<T>& model,
                             const BasicTensor<T>& x, const BasicTensor<T>& prior) {
  const Runner<T> run(tape, model);
  const ModelConfig& cfg = model.config();

  BasicTensor<T> features = x;
  BasicTensor<T> dense;
  for (int i = 0; i < cfg.dense_layers; ++i) {
    dense = run.leaky(run.conv("local.dense." + std::to_string(i), features));
    if (i + 1 < cfg.dense_layers) features = ops::concat_channels(tape, features, dense);
  }

  const MaskPair<T> masks = make_masks(prior, cfg.mask_threshold);
  const auto conds = sft_conditions(tape, model, prior, masks.bright_valid);
  const EncoderOutput<T> enc = encoder_forward(tape, model, x, masks.bright_invalid, conds);

  BasicTensor<T> h = enc.bottleneck;
  for (int l = cfg.unet_levels - 1; l >= 0; --l) {
    h = ops::resample(tape, h, ops::Resample::up2);
    h = ops::concat_channels(tape, h, enc.skips[l]);
    h = run.leaky(run.conv("local.up" + std::to_string(l) + ".fuse", h));
    for (int r = 0; r < cfg.unet_rb_per_level; ++r) {
      h = run.sft_block("local.dec" + std::to_string(l) + ".rb" + std::to_string(r), h,
                        conds[l]);
    }
  }
  return run.leaky(run.conv("local.fusion", ops::concat_channels(tape, dense, h)));
}

}  // namespace

template <typename T>
BasicTensor<T> global_net_forward(Tape<T>* tape, const Model<T>& model,
                                  const BasicTensor<T>& x,
                                  const BasicTensor<T>& prior) {
  check_input(x.shape(), prior.shape(), "global_net_forward");
  const Runner<T> run(tape, model);
  const ModelConfig& cfg = model.config();
  const int M = cfg.global_mlp_channels;

  BasicTensor<T> m = run.leaky(run.conv("global.mod.0", prior));
  m = run.leaky(run.conv("global.mod.1", m));
  m = ops::global_avg_pool(tape, run.conv("global.mod.2", m));
  const BasicTensor<T> alpha = ops::add_scalar(tape, ops::slice_channels(tape, m, 0, M), 1.0);
  const BasicTensor<T> beta = ops::slice_channels(tape, m, M, M);

  BasicTensor<T> h = x;
  for (int i = 0; i < cfg.global_mlp_layers; ++i) {
    h = run.conv("global.mlp." + std::to_string(i), h);
    if (i + 1 == cfg.global_mlp_layers) return ops::relu(tape, h);
    h = run.leaky(h);
    if (i + 1 == cfg.modulation_after) h = channel_modulation(tape, h, alpha, beta);
  }
  return h;
}

template <typename T>
std::vector<BasicTensor<T>> sft_conditions(Tape<T>* tape, const Model<T>& model,
                                           const BasicTensor<T>& prior,
                                           const BasicTensor<T>& bright_valid) {
  const Runner<T> run(tape, model);
  const BasicTensor<T> weighted = ops::mul_map(tape, prior, bright_valid);
  std::vector<BasicTensor<T>> conds;
  conds.push_back(run.leaky(run.conv("local.cond.1", run.leaky(run.conv("local.cond.0", weighted)))));
  for (int l = 1; l <= model.config().unet_levels; ++l) {
    conds.push_back(ops::resample(tape, conds.back(), ops::Resample::down2));
  }
  return conds;
}

template <typename T>
EncoderOutput<T> encoder_forward(Tape<T>* tape, const Model<T>& model,
                                 const BasicTensor<T>& x,
                                 const BasicTensor<T>& bright_invalid,
                                 const std::vector<BasicTensor<T>>& conditions) {
  const Runner<T> run(tape, model);
  const ModelConfig& cfg = model.config();
  const bool pc = cfg.use_partial_conv;
  const int a = cfg.alignment();
  if (x.h() % a != 0 || x.w() % a != 0) {
    throw std::invalid_argument("encoder_forward: dims " + x.shape().str() +
                                " are not multiples of " + std::to_string(a));
  }
  if (!pc && static_cast<int>(conditions.size()) <= cfg.unet_levels) {
    throw std::invalid_argument("encoder_forward: SFT blocks need one condition per level");
  }

  BasicTensor<T> mask = bright_invalid;
  BasicTensor<T> h;
  if (pc) {
    auto head = run.pconv("local.head", x, mask);
    h = head.features;
    mask = head.mask;
  } else {
    h = run.conv("local.head", x);
  }
  h = run.leaky(h);

  EncoderOutput<T> out;
  for (int l = 0; l <= cfg.unet_levels; ++l) {
    const std::string level = std::to_string(l);
    if (l > 0) {
      h = ops::resample(tape, h, ops::Resample::down2);
      if (pc) {
        mask = ops::resample<T>(nullptr, mask, ops::Resample::down2);
        auto down = run.pconv("local.down" + level, h, mask);
        h = down.features;
        mask = down.mask;
      } else {
        h = run.conv("local.down" + level, h);
      }
      h = run.leaky(h);
    }
    for (int r = 0; r < run.rb_count(l); ++r) {
      const std::string name = "local.enc" + level + ".rb" + std::to_string(r);
      if (pc) {
        auto block = run.pconv_block(name, h, mask);
        h = block.features;
        mask = block.mask;
      } else {
        h = run.sft_block(name, h, conditions[l]);
      }
    }
    if (l < cfg.unet_levels) {
      out.skips.push_back(h);
    } else {
      out.bottleneck = h;
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> local_net_forward(Tape<T>* tape, const Model<T>& model,
                                 const BasicTensor<T>& x,
                                 const BasicTensor<T>& prior) {
  check_input(x.shape(), prior.shape(), "local_net_forward");
  const int a = model.config().alignment();
  const BasicTensor<T> out =
      local_aligned(tape, model, pad_to(tape, x, a), pad_to(tape, prior, a));
  if (out.h() == x.h() && out.w() == x.w()) return out;
  return ops::crop(tape, out, x.h(), x.w());
}

template <typename T>
BasicTensor<T> lhdr_forward(Tape<T>* tape, const Model<T>& model,
                            const BasicTensor<T>& sdr) {
  check_input(sdr.shape(), sdr.shape(), "lhdr_forward");
  const BasicTensor<T> x = pad_to(tape, sdr, model.config().alignment());
  const BasicTensor<T> local = local_aligned(tape, model, x, x);
  const BasicTensor<T> out = global_net_forward(tape, model, local, x);
  if (out.h() == sdr.h() && out.w() == sdr.w()) return out;
  return ops::crop(tape, out, sdr.h(), sdr.w());
}

Image lhdr_forward(const Model<float>& model, const Image& sdr) {
  sdr.validate();
  if (sdr.domain != Domain::nonlinear_sdr) {
    throw std::invalid_argument("lhdr_forward expects a nonlinear SDR image, got " +
                                std::string(to_string(sdr.domain)));
  }
  const Tensor out = lhdr_forward<float>(nullptr, model, to_tensor<float>(sdr));
  return to_image(out, Domain::nonlinear_hdr);
}

#define LHDR_INSTANTIATE_FORWARD(T)                                                 \
  template BasicTensor<T> global_net_forward(Tape<T>*, const Model<T>&,             \
                                             const BasicTensor<T>&,                 \
                                             const BasicTensor<T>&);                \
  template std::vector<BasicTensor<T>> sft_conditions(                              \
      Tape<T>*, const Model<T>&, const BasicTensor<T>&, const BasicTensor<T>&);     \
  template EncoderOutput<T> encoder_forward(Tape<T>*, const Model<T>&,              \
                                            const BasicTensor<T>&,                  \
                                            const BasicTensor<T>&,                  \
                                            const std::vector<BasicTensor<T>>&);    \
  template BasicTensor<T> local_net_forward(Tape<T>*, const Model<T>&,              \
                                            const BasicTensor<T>&,                  \
                                            const BasicTensor<T>&);                 \
  template BasicTensor<T> lhdr_forward(Tape<T>*, const Model<T>&,                   \
                                       const BasicTensor<T>&);

LHDR_INSTANTIATE_FORWARD(float)
LHDR_INSTANTIATE_FORWARD(double)

}  // namespace lhdr::net
