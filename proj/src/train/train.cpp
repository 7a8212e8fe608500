// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "lhdr/train.hpp"

namespace lhdr::train {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("train config: " + what);
}

}  // namespace

void TrainConfig::validate() const {
  require(std::isfinite(lr0) && lr0 > 0, "lr0 must be positive");
  require(lr_half_every > 0, "lr_half_every must be positive");
  require(batch >= 1, "batch must be >= 1");
  require(patch_size >= 8, "patch_size must be >= 8");
  require(max_iters >= 0, "max_iters must be >= 0");
  require(loss_grad_weight >= 0, "loss_grad_weight must be >= 0");
  require(gamma > 0 && gamma < 1, "gamma must lie in (0, 1)");
  require(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1,
          "Adam betas must lie in [0, 1)");
  require(adam_eps > 0, "adam_eps must be positive");
  for (double w : source_weights) require(w >= 0, "source weights must be >= 0");
}

KeyValues TrainConfig::to_kv() const {
  KeyValues kv;
  kv.set("lr0", lr0);
  kv.set("lr_half_every", lr_half_every);
  kv.set("batch", batch);
  kv.set("patch_size", patch_size);
  kv.set("max_iters", max_iters);
  kv.set("loss_grad_weight", loss_grad_weight);
  kv.set("gamma", gamma);
  kv.set("adam_beta1", adam_beta1);
  kv.set("adam_beta2", adam_beta2);
  kv.set("adam_eps", adam_eps);
  kv.set("degrade_inputs", degrade_inputs);
  std::string weights;
  for (double w : source_weights) weights += (weights.empty() ? "" : ", ") + format_double(w);
  if (!weights.empty()) kv.set("source_weights", weights);
  kv.set("seed", static_cast<long long>(seed));
  return kv;
}

TrainConfig TrainConfig::from_kv(const KeyValues& kv) {
  kv.require_known({"lr0", "lr_half_every", "batch", "patch_size", "max_iters",
                    "loss_grad_weight", "gamma", "adam_beta1", "adam_beta2", "adam_eps",
                    "degrade_inputs", "source_weights", "seed"});
  TrainConfig cfg;
  if (kv.has("lr0")) cfg.lr0 = kv.get_double("lr0");
  if (kv.has("lr_half_every")) cfg.lr_half_every = kv.get_double("lr_half_every");
  if (kv.has("batch")) cfg.batch = static_cast<int>(kv.get_int("batch"));
  if (kv.has("patch_size")) cfg.patch_size = static_cast<int>(kv.get_int("patch_size"));
  if (kv.has("max_iters")) cfg.max_iters = static_cast<int>(kv.get_int("max_iters"));
  if (kv.has("loss_grad_weight")) cfg.loss_grad_weight = kv.get_double("loss_grad_weight");
  if (kv.has("gamma")) cfg.gamma = kv.get_double("gamma");
  if (kv.has("adam_beta1")) cfg.adam_beta1 = kv.get_double("adam_beta1");
  if (kv.has("adam_beta2")) cfg.adam_beta2 = kv.get_double("adam_beta2");
  if (kv.has("adam_eps")) cfg.adam_eps = kv.get_double("adam_eps");
  if (kv.has("degrade_inputs")) cfg.degrade_inputs = kv.get_bool("degrade_inputs");
  if (kv.has("source_weights")) cfg.source_weights = kv.get_doubles("source_weights");
  if (kv.has("seed")) {
    const long long s = kv.get_int("seed");
    if (s < 0) throw ParseError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  }
  cfg.validate();
  return cfg;
}

template <typename T>
LossTerms<T> lhdr_loss(Tape<T>* tape, const BasicTensor<T>& pred,
                       const BasicTensor<T>& target, double grad_weight) {
  if (!(pred.shape() == target.shape())) {
    throw std::invalid_argument("loss: prediction " + pred.shape().str() +
                                " and target " + target.shape().str() + " differ");
  }
  const BasicTensor<T> l1 = ops::l1_loss(tape, pred, target);
  const BasicTensor<T> lg = ops::l1_loss(tape, ops::grad_map(tape, pred),
                                         ops::grad_map<T>(nullptr, target));
  LossTerms<T> out;
  out.l1 = static_cast<double>(l1.item());
  out.lg = static_cast<double>(lg.item());
  out.total = ops::add(tape, l1, ops::scale(tape, lg, grad_weight));
  return out;
}

template LossTerms<float> lhdr_loss(Tape<float>*, const Tensor&, const Tensor&, double);
template LossTerms<double> lhdr_loss(Tape<double>*, const Tensor64&, const Tensor64&, double);

std::string format_loss_line(const LossRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld, %.6g, %.8g, %.8g, %.8g", static_cast<long long>(r.iter),
                r.lr, r.l1, r.lg, r.total);
  return buf;
}

namespace {

struct Batch {
  Tensor input;
  Tensor target;
};

std::size_t pick(Rng& rng, const std::vector<double>& weights, std::size_t n) {
  if (weights.empty()) return static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(n) - 1));
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  return dist(rng.engine());
}

Batch sample_batch(std::span<const TrainPair> data, const TrainConfig& cfg,
                   const degrade::DegradationConfig& degradation, Rng& rng) {
  std::vector<Image> inputs;
  std::vector<Image> targets;
  const int s = cfg.patch_size;
  for (int b = 0; b < cfg.batch; ++b) {
    const TrainPair& pair = data[pick(rng, cfg.source_weights, data.size())];
    const int x = rng.uniform_int(0, pair.hdr.width - s);
    const int y = rng.uniform_int(0, pair.hdr.height - s);
    Image sdr = crop(pair.sdr, x, y, s, s);
    if (cfg.degrade_inputs) sdr = degrade::conventional_degrade(sdr, degradation, rng).image;
    inputs.push_back(std::move(sdr));
    targets.push_back(preprocess_gamma(crop(pair.hdr, x, y, s, s), cfg.gamma).image);
  }
  return Batch{stack_images(inputs), stack_images(targets)};
}

}  // namespace

TrainResult train_loop(const net::ModelConfig& model_cfg, const TrainConfig& cfg,
                       const degrade::DegradationConfig& degradation,
                       std::span<const TrainPair> data, const net::Model<float>* init,
                       const IterationCallback& on_iter) {
  cfg.validate();
  degradation.validate();
  if (data.empty()) throw std::invalid_argument("train_loop: empty dataset");
  if (!cfg.source_weights.empty() && cfg.source_weights.size() != data.size()) {
    throw std::invalid_argument("train_loop: source_weights must have one entry per pair");
  }
  for (const TrainPair& p : data) {
    if (p.hdr.width != p.sdr.width || p.hdr.height != p.sdr.height) {
      throw std::invalid_argument("train_loop: HDR and SDR dims differ within a pair");
    }
    if (p.hdr.width < cfg.patch_size || p.hdr.height < cfg.patch_size) {
      throw std::invalid_argument("train_loop: pair smaller than patch_size " +
                                  std::to_string(cfg.patch_size));
    }
  }

  TrainResult result{init ? init->cast<float>() : net::Model<float>(model_cfg), {}};
  if (init && !(init->config() == model_cfg)) {
    throw std::invalid_argument("train_loop: initial model config does not match");
  }
  if (!init) {
    Rng init_rng = Rng::stream(cfg.seed, 0);
    kaiming_init(result.model, init_rng);
  }
  net::Model<float>& model = result.model;
  Rng rng = Rng::stream(cfg.seed, 1);
  OptimState state = make_optim_state(cfg);

  for (std::int64_t iter = 0; iter < cfg.max_iters; ++iter) {
    const double lr = lr_schedule(iter, cfg);
    const Batch batch = sample_batch(data, cfg, degradation, rng);
    Tape<float> tape;
    const Tensor pred = net::lhdr_forward(&tape, model, batch.input);
    const LossTerms<float> loss = lhdr_loss(&tape, pred, batch.target, cfg.loss_grad_weight);
    const LossRecord rec{iter, lr, loss.l1, loss.lg, static_cast<double>(loss.total.item())};
    if (!std::isfinite(rec.total)) {
      throw std::runtime_error("non-finite loss at iteration " + std::to_string(iter));
    }
    model.zero_grad();
    backward(tape, loss.total);
    adam_step(model, state, lr);
    result.log.push_back(rec);
    if (on_iter) on_iter(rec);
  }
  return result;
}

LossRecord evaluate_loss(const net::Model<float>& model, std::span<const TrainPair> data,
                         const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("evaluate_loss: empty dataset");
  LossRecord sum;
  for (const TrainPair& p : data) {
    const Tensor pred = net::lhdr_forward<float>(nullptr, model, to_tensor<float>(p.sdr));
    const Tensor target = to_tensor<float>(preprocess_gamma(p.hdr, cfg.gamma).image);
    const LossTerms<float> loss = lhdr_loss<float>(nullptr, pred, target, cfg.loss_grad_weight);
    sum.l1 += loss.l1;
    sum.lg += loss.lg;
    sum.total += static_cast<double>(loss.total.item());
  }
  const double n = static_cast<double>(data.size());
  sum.l1 /= n;
  sum.lg /= n;
  sum.total /= n;
  return sum;
}

}  // namespace lhdr::train
