// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lhdr/tensor.hpp"

#include <cstdint>

namespace lhdr::ops {

/// Convolution geometry. Weights are (out_channels, in_channels/groups, k, k).
struct ConvSpec {
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int padding = 1;
  int groups = 1;

  /// Throws std::invalid_argument if any field is non-positive or the
  /// channel counts are not divisible by groups.
  void validate() const;
  Shape weight_shape() const;
  std::int64_t weight_count() const;
  std::int64_t param_count() const { return weight_count() + out_channels; }
  int out_size(int in) const { return (in + 2 * padding - kernel) / stride + 1; }

  static ConvSpec same(int in, int out, int k, int groups = 1) {
    return ConvSpec{in, out, k, 1, k / 2, groups};
  }
};

/// Grouped 2-D convolution with zero padding. `bias` may be undefined.
template <typename T>
BasicTensor<T> conv2d(Tape<T>* tape, const BasicTensor<T>& x,
                      const ConvSpec& spec, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias);

enum class ActivationKind { leaky_relu, relu };

template <typename T>
BasicTensor<T> leaky_relu(Tape<T>* tape, const BasicTensor<T>& x, double slope);
template <typename T>
BasicTensor<T> relu(Tape<T>* tape, const BasicTensor<T>& x);
template <typename T>
BasicTensor<T> activation(Tape<T>* tape, const BasicTensor<T>& x,
                          ActivationKind kind, double slope = 0.2);

enum class Resample { down2, up2 };

/// down2: 2x2 average pooling (even dims required). up2: nearest neighbour.
template <typename T>
BasicTensor<T> resample(Tape<T>* tape, const BasicTensor<T>& x, Resample mode);

template <typename T>
BasicTensor<T> concat_channels(Tape<T>* tape, const BasicTensor<T>& a,
                               const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> slice_channels(Tape<T>* tape, const BasicTensor<T>& x, int begin,
                              int count);

template <typename T>
BasicTensor<T> global_avg_pool(Tape<T>* tape, const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> add(Tape<T>* tape, const BasicTensor<T>& a,
                   const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> mul(Tape<T>* tape, const BasicTensor<T>& a,
                   const BasicTensor<T>& b);
template <typename T>
BasicTensor<T> add_scalar(Tape<T>* tape, const BasicTensor<T>& x, double s);
template <typename T>
BasicTensor<T> scale(Tape<T>* tape, const BasicTensor<T>& x, double s);

/// x * map, where map has one channel and is broadcast over x's channels.
/// The map is treated as a constant (no gradient flows into it).
template <typename T>
BasicTensor<T> mul_map(Tape<T>* tape, const BasicTensor<T>& x,
                       const BasicTensor<T>& map);

/// Adds a per-channel bias of dims (1, c, 1, 1).
template <typename T>
BasicTensor<T> add_bias(Tape<T>* tape, const BasicTensor<T>& x,
                        const BasicTensor<T>& bias);

template <typename T>
BasicTensor<T> sum(Tape<T>* tape, const BasicTensor<T>& x);

/// Mean absolute difference, a scalar.
template <typename T>
BasicTensor<T> l1_loss(Tape<T>* tape, const BasicTensor<T>& a,
                       const BasicTensor<T>& b);

/// Forward differences along w and h, zero on the last column/row.
/// Output dims (2n, c, h, w): horizontal maps first, then vertical.
template <typename T>
BasicTensor<T> grad_map(Tape<T>* tape, const BasicTensor<T>& x);

/// Reflect-pads on the bottom/right edges.
template <typename T>
BasicTensor<T> pad_reflect(Tape<T>* tape, const BasicTensor<T>& x, int bottom,
                           int right);
/// Keeps the top-left h x w window.
template <typename T>
BasicTensor<T> crop(Tape<T>* tape, const BasicTensor<T>& x, int h, int w);

// Non-differentiable helpers for masks.

/// Per-pixel maximum over channels, dims (n, 1, h, w).
template <typename T>
BasicTensor<T> channel_max(const BasicTensor<T>& x);

/// Sum of a 1-channel map over every k x k window of `spec` geometry, and
/// the count of in-bounds pixels in each window.
template <typename T>
void window_sums(const BasicTensor<T>& map, const ConvSpec& spec,
                 BasicTensor<T>& sums, BasicTensor<T>& in_bounds);

}  // namespace lhdr::ops
