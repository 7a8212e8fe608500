// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <stdexcept>

#include "lhdr/net.hpp"

namespace lhdr::net {

template <typename T>
BasicTensor<T> channel_modulation(Tape<T>* tape, const BasicTensor<T>& x,
                                  const BasicTensor<T>& alpha,
                                  const BasicTensor<T>& beta) {
  const Shape s = x.shape();
  const Shape ps{s.n, s.c, 1, 1};
  if (!(alpha.shape() == ps) || !(beta.shape() == ps)) {
    throw std::invalid_argument("channel_modulation: alpha/beta must be " +
                                ps.str() + ", got " + alpha.shape().str() +
                                " and " + beta.shape().str());
  }
  BasicTensor<T> out(s);
  const long plane = static_cast<long>(s.h) * s.w;
  for (long p = 0; p < static_cast<long>(s.n) * s.c; ++p) {
    const T a = alpha.ptr()[p];
    const T b = beta.ptr()[p];
    const T* ip = x.ptr() + p * plane;
    T* op = out.ptr() + p * plane;
    for (long j = 0; j < plane; ++j) op[j] = a * ip[j] + b;
  }
  if (should_record(tape, {&x, &alpha, &beta})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto ai = alpha.impl();
    auto bi = beta.impl();
    auto oi = out.impl();
    tape->record("channel_modulation", {xi, ai, bi}, oi, [xi, ai, bi, oi, s, plane] {
      if (xi->requires_grad) xi->ensure_grad();
      if (ai->requires_grad) ai->ensure_grad();
      if (bi->requires_grad) bi->ensure_grad();
      for (long p = 0; p < static_cast<long>(s.n) * s.c; ++p) {
        const T* go = oi->grad.data() + p * plane;
        const T* ip = xi->data.data() + p * plane;
        T ga = 0;
        T gb = 0;
        for (long j = 0; j < plane; ++j) {
          ga += go[j] * ip[j];
          gb += go[j];
        }
        if (ai->requires_grad) ai->grad[p] += ga;
        if (bi->requires_grad) bi->grad[p] += gb;
        if (xi->requires_grad) {
          const T a = ai->data[p];
          T* gi = xi->grad.data() + p * plane;
          for (long j = 0; j < plane; ++j) gi[j] += a * go[j];
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> sft_modulation(Tape<T>* tape, const BasicTensor<T>& x,
                              const BasicTensor<T>& alpha,
                              const BasicTensor<T>& beta) {
  if (!(alpha.shape() == x.shape()) || !(beta.shape() == x.shape())) {
    throw std::invalid_argument("sft_modulation: shape mismatch " +
                                x.shape().str() + " / " + alpha.shape().str() +
                                " / " + beta.shape().str());
  }
  BasicTensor<T> out(x.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) {
    out.ptr()[i] = alpha.ptr()[i] * x.ptr()[i] + beta.ptr()[i];
  }
  if (should_record(tape, {&x, &alpha, &beta})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto ai = alpha.impl();
    auto bi = beta.impl();
    auto oi = out.impl();
    tape->record("sft_modulation", {xi, ai, bi}, oi, [xi, ai, bi, oi] {
      const std::size_t count = oi->data.size();
      if (xi->requires_grad) {
        xi->ensure_grad();
        for (std::size_t i = 0; i < count; ++i) xi->grad[i] += ai->data[i] * oi->grad[i];
      }
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < count; ++i) ai->grad[i] += xi->data[i] * oi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < count; ++i) bi->grad[i] += oi->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
MaskedFeatures<T> partial_conv(Tape<T>* tape, const BasicTensor<T>& x,
                               const BasicTensor<T>& mask,
                               const ops::ConvSpec& spec,
                               const BasicTensor<T>& weight,
                               const BasicTensor<T>& bias) {
  const Shape s = x.shape();
  const Shape ms = mask.shape();
  if (ms.n != s.n || ms.c != 1 || ms.h != s.h || ms.w != s.w) {
    throw std::invalid_argument("partial_conv: mask " + ms.str() +
                                " does not match input " + s.str());
  }
  BasicTensor<T> sums;
  BasicTensor<T> area;
  ops::window_sums(mask, spec, sums, area);

  BasicTensor<T> ratio(sums.shape());
  BasicTensor<T> new_mask(sums.shape());
  for (std::size_t i = 0; i < sums.numel(); ++i) {
    const bool seen = sums.ptr()[i] > T(0);
    ratio.ptr()[i] = seen ? area.ptr()[i] / sums.ptr()[i] : T(0);
    new_mask.ptr()[i] = seen ? T(1) : T(0);
  }

  const BasicTensor<T> gated = ops::mul_map(tape, x, mask);
  const BasicTensor<T> conv = ops::conv2d(tape, gated, spec, weight, BasicTensor<T>{});
  BasicTensor<T> out = ops::mul_map(tape, conv, ratio);
  if (bias.defined()) out = ops::add_bias(tape, out, bias);
  return MaskedFeatures<T>{std::move(out), std::move(new_mask)};
}

#define LHDR_INSTANTIATE_LAYERS(T)                                                \
  template BasicTensor<T> channel_modulation(Tape<T>*, const BasicTensor<T>&,     \
                                             const BasicTensor<T>&,               \
                                             const BasicTensor<T>&);              \
  template BasicTensor<T> sft_modulation(Tape<T>*, const BasicTensor<T>&,         \
                                         const BasicTensor<T>&,                   \
                                         const BasicTensor<T>&);                  \
  template MaskedFeatures<T> partial_conv(Tape<T>*, const BasicTensor<T>&,        \
                                          const BasicTensor<T>&,                  \
                                          const ops::ConvSpec&,                   \
                                          const BasicTensor<T>&,                  \
                                          const BasicTensor<T>&);

LHDR_INSTANTIATE_LAYERS(float)
LHDR_INSTANTIATE_LAYERS(double)

}  // namespace lhdr::net
