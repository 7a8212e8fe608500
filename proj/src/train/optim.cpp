// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <stdexcept>

#include "lhdr/train.hpp"

namespace lhdr::train {

template <typename T>
void kaiming_init(net::Model<T>& model, Rng& rng) {
  for (auto& p : model.parameters()) {
    auto data = p.tensor.data();
    if (p.name.ends_with(".bias")) {
      std::fill(data.begin(), data.end(), T(0));
      continue;
    }
    const Shape& s = p.tensor.shape();
    const double fan_in = static_cast<double>(s.c) * s.h * s.w;
    const double sd = std::sqrt(2.0 / fan_in);
    for (T& v : data) v = static_cast<T>(rng.normal(0.0, sd));
  }
}

OptimState make_optim_state(const TrainConfig& cfg) {
  OptimState s;
  s.beta1 = cfg.adam_beta1;
  s.beta2 = cfg.adam_beta2;
  s.eps = cfg.adam_eps;
  return s;
}

template <typename T>
void adam_step(net::Model<T>& model, OptimState& state, double lr) {
  if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be positive");
  auto& params = model.parameters();
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.tensor.numel(), 0.0);
      state.v.emplace_back(p.tensor.numel(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: optimiser state does not match the model");
  }
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) continue;
    for (T g : p.tensor.grad()) {
      if (!std::isfinite(g)) {
        throw std::runtime_error("non-finite gradient in parameter " + p.name);
      }
    }
  }

  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& t = params[i].tensor;
    auto& m = state.m[i];
    auto& v = state.v[i];
    if (m.size() != t.numel()) {
      throw std::invalid_argument("adam_step: moment size mismatch for " + params[i].name);
    }
    const bool has = t.has_grad();
    auto data = t.data();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double g = has ? static_cast<double>(t.grad()[j]) : 0.0;
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * g;
      v[j] = state.beta2 * v[j] + (1.0 - state.beta2) * g * g;
      const double mh = m[j] / c1;
      const double vh = v[j] / c2;
      data[j] = static_cast<T>(data[j] - lr * mh / (std::sqrt(vh) + state.eps));
    }
  }
}

double lr_schedule(std::int64_t iter, const TrainConfig& cfg) {
  if (iter < 0) throw std::invalid_argument("lr_schedule: iteration must be >= 0");
  const double halvings = std::floor(static_cast<double>(iter) / cfg.lr_half_every);
  return cfg.lr0 * std::pow(0.5, halvings);
}

template void kaiming_init(net::Model<float>&, Rng&);
template void kaiming_init(net::Model<double>&, Rng&);
template void adam_step(net::Model<float>&, OptimState&, double);
template void adam_step(net::Model<double>&, OptimState&, double);

}  // namespace lhdr::train
