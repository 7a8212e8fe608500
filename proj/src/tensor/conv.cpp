// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "gemm.hpp"
#include "lhdr/ops.hpp"

namespace lhdr::ops {

void ConvSpec::validate() const {
  if (in_channels <= 0 || out_channels <= 0 || kernel <= 0 || stride <= 0 ||
      padding < 0 || groups <= 0) {
    throw std::invalid_argument("conv spec fields must be positive");
  }
  if (in_channels % groups != 0 || out_channels % groups != 0) {
    throw std::invalid_argument(
        "groups=" + std::to_string(groups) + " must divide in_channels=" +
        std::to_string(in_channels) + " and out_channels=" +
        std::to_string(out_channels));
  }
}

Shape ConvSpec::weight_shape() const {
  return Shape{out_channels, in_channels / groups, kernel, kernel};
}

std::int64_t ConvSpec::weight_count() const {
  return static_cast<std::int64_t>(out_channels) * (in_channels / groups) *
         kernel * kernel;
}

namespace {

// Work buffers are bounded to about this many elements; larger outputs are
// processed in bands of output rows.
constexpr std::size_t kColumnBudget = std::size_t{1} << 20;

struct Geometry {
  int N, Cin, H, W, Cout, Ho, Wo, k, stride, pad, groups;
  int cig, cog, K;
  bool pointwise;

  int band_rows() const {
    const std::size_t per_row = static_cast<std::size_t>(K) * Wo;
    return static_cast<int>(std::clamp<std::size_t>(
        kColumnBudget / std::max<std::size_t>(per_row, 1), 1, Ho));
  }
};

Geometry make_geometry(const Shape& x, const ConvSpec& spec) {
  Geometry g{};
  g.N = x.n;
  g.Cin = x.c;
  g.H = x.h;
  g.W = x.w;
  g.Cout = spec.out_channels;
  g.k = spec.kernel;
  g.stride = spec.stride;
  g.pad = spec.padding;
  g.groups = spec.groups;
  g.Ho = spec.out_size(x.h);
  g.Wo = spec.out_size(x.w);
  g.cig = spec.in_channels / spec.groups;
  g.cog = spec.out_channels / spec.groups;
  g.K = g.cig * g.k * g.k;
  g.pointwise = g.k == 1 && g.stride == 1 && g.pad == 0;
  return g;
}

// Unfolds output rows [r0, r1) of one channel group into col[K x L].
template <typename T>
void im2col(const Geometry& g, const T* x, int r0, int r1, T* col) {
  const int L = (r1 - r0) * g.Wo;
  for (int ci = 0; ci < g.cig; ++ci) {
    const T* plane = x + static_cast<long>(ci) * g.H * g.W;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        T* dst = col + static_cast<long>((ci * g.k + ky) * g.k + kx) * L;
        for (int r = r0; r < r1; ++r) {
          const int iy = r * g.stride - g.pad + ky;
          T* drow = dst + static_cast<long>(r - r0) * g.Wo;
          if (iy < 0 || iy >= g.H) {
            std::fill_n(drow, g.Wo, T(0));
            continue;
          }
          const T* srow = plane + static_cast<long>(iy) * g.W;
          for (int ox = 0; ox < g.Wo; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            drow[ox] = (ix >= 0 && ix < g.W) ? srow[ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_acc(const Geometry& g, const T* col, int r0, int r1, T* dx) {
  const int L = (r1 - r0) * g.Wo;
  for (int ci = 0; ci < g.cig; ++ci) {
    T* plane = dx + static_cast<long>(ci) * g.H * g.W;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        const T* src = col + static_cast<long>((ci * g.k + ky) * g.k + kx) * L;
        for (int r = r0; r < r1; ++r) {
          const int iy = r * g.stride - g.pad + ky;
          if (iy < 0 || iy >= g.H) continue;
          const T* srow = src + static_cast<long>(r - r0) * g.Wo;
          T* drow = plane + static_cast<long>(iy) * g.W;
          for (int ox = 0; ox < g.Wo; ++ox) {
            const int ix = ox * g.stride - g.pad + kx;
            if (ix >= 0 && ix < g.W) drow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void check_conv_args(const BasicTensor<T>& x, const ConvSpec& spec,
                     const BasicTensor<T>& weight, const BasicTensor<T>& bias) {
  spec.validate();
  if (!x.defined() || !weight.defined()) {
    throw std::invalid_argument("conv2d: undefined input or weight");
  }
  if (x.c() != spec.in_channels) {
    throw std::invalid_argument("conv2d: input has " + std::to_string(x.c()) +
                                " channels, spec expects " +
                                std::to_string(spec.in_channels));
  }
  if (!(weight.shape() == spec.weight_shape())) {
    throw std::invalid_argument("conv2d: weight dims " + weight.shape().str() +
                                " != " + spec.weight_shape().str());
  }
  if (bias.defined() && !(bias.shape() == Shape{1, spec.out_channels, 1, 1})) {
    throw std::invalid_argument("conv2d: bias dims " + bias.shape().str());
  }
  if (spec.out_size(x.h()) <= 0 || spec.out_size(x.w()) <= 0) {
    throw std::invalid_argument("conv2d: input " + x.shape().str() +
                                " too small for kernel");
  }
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d(Tape<T>* tape, const BasicTensor<T>& x,
                      const ConvSpec& spec, const BasicTensor<T>& weight,
                      const BasicTensor<T>& bias) {
  check_conv_args(x, spec, weight, bias);
  const Geometry g = make_geometry(x.shape(), spec);
  const long P = static_cast<long>(g.Ho) * g.Wo;
  const long HW = static_cast<long>(g.H) * g.W;
  BasicTensor<T> out(Shape{g.N, g.Cout, g.Ho, g.Wo});

  const int band = g.band_rows();
  std::vector<T> col;
  if (!g.pointwise) col.resize(static_cast<std::size_t>(g.K) * band * g.Wo);

  const T* xp = x.ptr();
  const T* wp = weight.ptr();
  T* op = out.ptr();
  for (int n = 0; n < g.N; ++n) {
    for (int grp = 0; grp < g.groups; ++grp) {
      const T* xg = xp + (static_cast<long>(n) * g.Cin + grp * g.cig) * HW;
      T* og = op + (static_cast<long>(n) * g.Cout + grp * g.cog) * P;
      const T* wg = wp + static_cast<long>(grp) * g.cog * g.K;
      if (g.pointwise) {
        detail::gemm_acc(g.cog, static_cast<int>(P), g.K, wg, g.K, xg,
                         static_cast<int>(HW), og, static_cast<int>(P));
        continue;
      }
      for (int r0 = 0; r0 < g.Ho; r0 += band) {
        const int r1 = std::min(g.Ho, r0 + band);
        const int L = (r1 - r0) * g.Wo;
        im2col(g, xg, r0, r1, col.data());
        detail::gemm_acc(g.cog, L, g.K, wg, g.K, col.data(), L,
                         og + static_cast<long>(r0) * g.Wo, static_cast<int>(P));
      }
    }
  }
  if (bias.defined()) {
    const T* bp = bias.ptr();
    for (int n = 0; n < g.N; ++n) {
      for (int co = 0; co < g.Cout; ++co) {
        T* plane = op + (static_cast<long>(n) * g.Cout + co) * P;
        const T b = bp[co];
        for (long p = 0; p < P; ++p) plane[p] += b;
      }
    }
  }

  if (should_record(tape, {&x, &weight, &bias})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto wi = weight.impl();
    auto bi = bias.defined() ? bias.impl() : nullptr;
    auto oi = out.impl();
    std::vector<typename Tape<T>::ImplPtr> inputs{xi, wi};
    if (bi) inputs.push_back(bi);
    tape->record("conv2d", std::move(inputs), oi, [g, xi, wi, bi, oi] {
      const long P = static_cast<long>(g.Ho) * g.Wo;
      const long HW = static_cast<long>(g.H) * g.W;
      const T* dout = oi->grad.data();
      if (bi && bi->requires_grad) {
        bi->ensure_grad();
        for (int n = 0; n < g.N; ++n) {
          for (int co = 0; co < g.Cout; ++co) {
            const T* plane = dout + (static_cast<long>(n) * g.Cout + co) * P;
            T acc = 0;
            for (long p = 0; p < P; ++p) acc += plane[p];
            bi->grad[co] += acc;
          }
        }
      }
      const bool need_w = wi->requires_grad;
      const bool need_x = xi->requires_grad;
      if (!need_w && !need_x) return;
      if (need_w) wi->ensure_grad();
      if (need_x) xi->ensure_grad();

      const int band = g.band_rows();
      const std::size_t band_len = static_cast<std::size_t>(band) * g.Wo;
      std::vector<T> col(g.pointwise ? 0 : static_cast<std::size_t>(g.K) * band_len);
      std::vector<T> col_t(need_w ? static_cast<std::size_t>(g.K) * band_len : 0);
      std::vector<T> dcol(need_x && !g.pointwise ? static_cast<std::size_t>(g.K) * band_len : 0);
      std::vector<T> w_t(static_cast<std::size_t>(g.K) * g.cog);

      for (int grp = 0; grp < g.groups; ++grp) {
        const T* wg = wi->data.data() + static_cast<long>(grp) * g.cog * g.K;
        if (need_x) detail::transpose(g.cog, g.K, wg, g.K, w_t.data(), g.cog);
        T* dwg = need_w ? wi->grad.data() + static_cast<long>(grp) * g.cog * g.K
                        : nullptr;
        for (int n = 0; n < g.N; ++n) {
          const T* xg =
              xi->data.data() + (static_cast<long>(n) * g.Cin + grp * g.cig) * HW;
          T* dxg = need_x ? xi->grad.data() +
                                (static_cast<long>(n) * g.Cin + grp * g.cig) * HW
                          : nullptr;
          const T* dog = dout + (static_cast<long>(n) * g.Cout + grp * g.cog) * P;
          for (int r0 = 0; r0 < g.Ho; r0 += band) {
            const int r1 = std::min(g.Ho, r0 + band);
            const int L = (r1 - r0) * g.Wo;
            const T* dog_band = dog + static_cast<long>(r0) * g.Wo;
            const T* cols;
            long ldcol;
            if (g.pointwise) {
              cols = xg + static_cast<long>(r0) * g.W;
              ldcol = HW;
            } else {
              im2col(g, xg, r0, r1, col.data());
              cols = col.data();
              ldcol = L;
            }
            if (need_w) {
              detail::transpose(g.K, L, cols, static_cast<int>(ldcol),
                                col_t.data(), g.K);
              detail::gemm_acc(g.cog, g.K, L, dog_band, static_cast<int>(P),
                               col_t.data(), g.K, dwg, g.K);
            }
            if (need_x) {
              if (g.pointwise) {
                detail::gemm_acc(g.K, L, g.cog, w_t.data(), g.cog, dog_band,
                                 static_cast<int>(P),
                                 dxg + static_cast<long>(r0) * g.W,
                                 static_cast<int>(HW));
              } else {
                std::fill(dcol.begin(), dcol.begin() + static_cast<long>(g.K) * L, T(0));
                detail::gemm_acc(g.K, L, g.cog, w_t.data(), g.cog, dog_band,
                                 static_cast<int>(P), dcol.data(), L);
                col2im_acc(g, dcol.data(), r0, r1, dxg);
              }
            }
          }
        }
      }
    });
  }
  debug_check_finite(out, "conv2d");
  return out;
}

template BasicTensor<float> conv2d(Tape<float>*, const BasicTensor<float>&,
                                   const ConvSpec&, const BasicTensor<float>&,
                                   const BasicTensor<float>&);
template BasicTensor<double> conv2d(Tape<double>*, const BasicTensor<double>&,
                                    const ConvSpec&, const BasicTensor<double>&,
                                    const BasicTensor<double>&);

}  // namespace lhdr::ops
