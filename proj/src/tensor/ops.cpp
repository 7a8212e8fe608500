// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "lhdr/ops.hpp"

namespace lhdr::ops {
namespace {

template <typename T>
using Ptr = typename Tape<T>::ImplPtr;

void require_same(const Shape& a, const Shape& b, const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.str() + " vs " + b.str());
  }
}

template <typename T>
bool wants(const Ptr<T>& p) {
  return p && p->requires_grad;
}

}  // namespace

template <typename T>
BasicTensor<T> leaky_relu(Tape<T>* tape, const BasicTensor<T>& x, double slope) {
  if (!(slope > 0.0 && slope < 1.0)) {
    throw std::invalid_argument("leaky_relu slope must lie in (0, 1)");
  }
  const T s = static_cast<T>(slope);
  BasicTensor<T> out(x.shape());
  const auto in = x.data();
  auto o = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = in[i] > 0 ? in[i] : s * in[i];
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("leaky_relu", {xi}, oi, [xi, oi, s] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < xi->data.size(); ++i) {
        xi->grad[i] += xi->data[i] > 0 ? oi->grad[i] : s * oi->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> relu(Tape<T>* tape, const BasicTensor<T>& x) {
  BasicTensor<T> out(x.shape());
  const auto in = x.data();
  auto o = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = in[i] > 0 ? in[i] : T(0);
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("relu", {xi}, oi, [xi, oi] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < xi->data.size(); ++i) {
        if (xi->data[i] > 0) xi->grad[i] += oi->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> activation(Tape<T>* tape, const BasicTensor<T>& x,
                          ActivationKind kind, double slope) {
  return kind == ActivationKind::relu ? relu(tape, x) : leaky_relu(tape, x, slope);
}

template <typename T>
BasicTensor<T> resample(Tape<T>* tape, const BasicTensor<T>& x, Resample mode) {
  const Shape s = x.shape();
  const bool down = mode == Resample::down2;
  if (down && (s.h % 2 != 0 || s.w % 2 != 0)) {
    throw std::invalid_argument("down2 needs even spatial dims, got " + s.str());
  }
  const Shape os = down ? Shape{s.n, s.c, s.h / 2, s.w / 2}
                        : Shape{s.n, s.c, s.h * 2, s.w * 2};
  BasicTensor<T> out(os);
  const long planes = static_cast<long>(s.n) * s.c;
  const T* in = x.ptr();
  T* o = out.ptr();
  for (long p = 0; p < planes; ++p) {
    const T* ip = in + p * s.h * s.w;
    T* opl = o + p * os.h * os.w;
    for (int y = 0; y < os.h; ++y) {
      for (int xx = 0; xx < os.w; ++xx) {
        if (down) {
          const T* r0 = ip + (2 * y) * s.w + 2 * xx;
          const T* r1 = r0 + s.w;
          opl[y * os.w + xx] = (r0[0] + r0[1] + r1[0] + r1[1]) * T(0.25);
        } else {
          opl[y * os.w + xx] = ip[(y / 2) * s.w + xx / 2];
        }
      }
    }
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record(down ? "down2" : "up2", {xi}, oi, [xi, oi, s, os, down, planes] {
      xi->ensure_grad();
      for (long p = 0; p < planes; ++p) {
        T* gi = xi->grad.data() + p * s.h * s.w;
        const T* go = oi->grad.data() + p * os.h * os.w;
        if (down) {
          for (int y = 0; y < os.h; ++y) {
            for (int xx = 0; xx < os.w; ++xx) {
              const T v = go[y * os.w + xx] * T(0.25);
              T* r0 = gi + (2 * y) * s.w + 2 * xx;
              r0[0] += v;
              r0[1] += v;
              r0[s.w] += v;
              r0[s.w + 1] += v;
            }
          }
        } else {
          for (int y = 0; y < os.h; ++y) {
            for (int xx = 0; xx < os.w; ++xx) {
              gi[(y / 2) * s.w + xx / 2] += go[y * os.w + xx];
            }
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> concat_channels(Tape<T>* tape, const BasicTensor<T>& a,
                               const BasicTensor<T>& b) {
  const Shape sa = a.shape();
  const Shape sb = b.shape();
  if (sa.n != sb.n || sa.h != sb.h || sa.w != sb.w) {
    throw std::invalid_argument("concat_channels: spatial mismatch " + sa.str() +
                                " vs " + sb.str());
  }
  const Shape os{sa.n, sa.c + sb.c, sa.h, sa.w};
  BasicTensor<T> out(os);
  const long plane = static_cast<long>(sa.h) * sa.w;
  const long la = sa.c * plane;
  const long lb = sb.c * plane;
  for (int n = 0; n < sa.n; ++n) {
    std::copy_n(a.ptr() + n * la, la, out.ptr() + n * (la + lb));
    std::copy_n(b.ptr() + n * lb, lb, out.ptr() + n * (la + lb) + la);
  }
  if (should_record(tape, {&a, &b})) {
    out.set_requires_grad(true);
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    tape->record("concat", {ai, bi}, oi, [ai, bi, oi, la, lb, n = sa.n] {
      if (ai->requires_grad) ai->ensure_grad();
      if (bi->requires_grad) bi->ensure_grad();
      for (int i = 0; i < n; ++i) {
        const T* go = oi->grad.data() + i * (la + lb);
        if (ai->requires_grad) {
          T* g = ai->grad.data() + i * la;
          for (long j = 0; j < la; ++j) g[j] += go[j];
        }
        if (bi->requires_grad) {
          T* g = bi->grad.data() + i * lb;
          for (long j = 0; j < lb; ++j) g[j] += go[la + j];
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> slice_channels(Tape<T>* tape, const BasicTensor<T>& x, int begin,
                              int count) {
  const Shape s = x.shape();
  if (begin < 0 || count <= 0 || begin + count > s.c) {
    throw std::invalid_argument("slice_channels: range out of bounds for " +
                                s.str());
  }
  const Shape os{s.n, count, s.h, s.w};
  BasicTensor<T> out(os);
  const long plane = static_cast<long>(s.h) * s.w;
  for (int n = 0; n < s.n; ++n) {
    std::copy_n(x.ptr() + (static_cast<long>(n) * s.c + begin) * plane,
                count * plane, out.ptr() + static_cast<long>(n) * count * plane);
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("slice", {xi}, oi, [xi, oi, s, begin, count, plane] {
      xi->ensure_grad();
      for (int n = 0; n < s.n; ++n) {
        T* g = xi->grad.data() + (static_cast<long>(n) * s.c + begin) * plane;
        const T* go = oi->grad.data() + static_cast<long>(n) * count * plane;
        for (long j = 0; j < count * plane; ++j) g[j] += go[j];
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> global_avg_pool(Tape<T>* tape, const BasicTensor<T>& x) {
  const Shape s = x.shape();
  BasicTensor<T> out(Shape{s.n, s.c, 1, 1});
  const long plane = static_cast<long>(s.h) * s.w;
  for (long p = 0; p < static_cast<long>(s.n) * s.c; ++p) {
    const T* ip = x.ptr() + p * plane;
    double acc = 0;
    for (long j = 0; j < plane; ++j) acc += ip[j];
    out.ptr()[p] = static_cast<T>(acc / static_cast<double>(plane));
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("global_avg_pool", {xi}, oi, [xi, oi, s, plane] {
      xi->ensure_grad();
      const T inv = T(1) / static_cast<T>(plane);
      for (long p = 0; p < static_cast<long>(s.n) * s.c; ++p) {
        const T v = oi->grad[p] * inv;
        T* g = xi->grad.data() + p * plane;
        for (long j = 0; j < plane; ++j) g[j] += v;
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> add(Tape<T>* tape, const BasicTensor<T>& a,
                   const BasicTensor<T>& b) {
  require_same(a.shape(), b.shape(), "add");
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out.ptr()[i] = a.ptr()[i] + b.ptr()[i];
  if (should_record(tape, {&a, &b})) {
    out.set_requires_grad(true);
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    tape->record("add", {ai, bi}, oi, [ai, bi, oi] {
      for (const auto& t : {ai, bi}) {
        if (!t->requires_grad) continue;
        t->ensure_grad();
        for (std::size_t i = 0; i < t->grad.size(); ++i) t->grad[i] += oi->grad[i];
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> mul(Tape<T>* tape, const BasicTensor<T>& a,
                   const BasicTensor<T>& b) {
  require_same(a.shape(), b.shape(), "mul");
  BasicTensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out.ptr()[i] = a.ptr()[i] * b.ptr()[i];
  if (should_record(tape, {&a, &b})) {
    out.set_requires_grad(true);
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    tape->record("mul", {ai, bi}, oi, [ai, bi, oi] {
      if (ai->requires_grad) {
        ai->ensure_grad();
        for (std::size_t i = 0; i < ai->grad.size(); ++i) {
          ai->grad[i] += oi->grad[i] * bi->data[i];
        }
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (std::size_t i = 0; i < bi->grad.size(); ++i) {
          bi->grad[i] += oi->grad[i] * ai->data[i];
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> add_scalar(Tape<T>* tape, const BasicTensor<T>& x, double s) {
  BasicTensor<T> out(x.shape());
  const T v = static_cast<T>(s);
  for (std::size_t i = 0; i < out.numel(); ++i) out.ptr()[i] = x.ptr()[i] + v;
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("add_scalar", {xi}, oi, [xi, oi] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < xi->grad.size(); ++i) xi->grad[i] += oi->grad[i];
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> scale(Tape<T>* tape, const BasicTensor<T>& x, double s) {
  BasicTensor<T> out(x.shape());
  const T v = static_cast<T>(s);
  for (std::size_t i = 0; i < out.numel(); ++i) out.ptr()[i] = x.ptr()[i] * v;
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("scale", {xi}, oi, [xi, oi, v] {
      xi->ensure_grad();
      for (std::size_t i = 0; i < xi->grad.size(); ++i) xi->grad[i] += v * oi->grad[i];
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> mul_map(Tape<T>* tape, const BasicTensor<T>& x,
                       const BasicTensor<T>& map) {
  const Shape s = x.shape();
  const Shape ms = map.shape();
  if (ms.n != s.n || ms.c != 1 || ms.h != s.h || ms.w != s.w) {
    throw std::invalid_argument("mul_map: map " + ms.str() +
                                " does not broadcast over " + s.str());
  }
  BasicTensor<T> out(s);
  const long plane = static_cast<long>(s.h) * s.w;
  for (int n = 0; n < s.n; ++n) {
    const T* m = map.ptr() + n * plane;
    for (int c = 0; c < s.c; ++c) {
      const long off = (static_cast<long>(n) * s.c + c) * plane;
      for (long j = 0; j < plane; ++j) out.ptr()[off + j] = x.ptr()[off + j] * m[j];
    }
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto mi = map.impl();
    auto oi = out.impl();
    tape->record("mul_map", {xi}, oi, [xi, mi, oi, s, plane] {
      xi->ensure_grad();
      for (int n = 0; n < s.n; ++n) {
        const T* m = mi->data.data() + n * plane;
        for (int c = 0; c < s.c; ++c) {
          const long off = (static_cast<long>(n) * s.c + c) * plane;
          for (long j = 0; j < plane; ++j) xi->grad[off + j] += oi->grad[off + j] * m[j];
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> add_bias(Tape<T>* tape, const BasicTensor<T>& x,
                        const BasicTensor<T>& bias) {
  const Shape s = x.shape();
  if (!(bias.shape() == Shape{1, s.c, 1, 1})) {
    throw std::invalid_argument("add_bias: bias " + bias.shape().str() +
                                " for input " + s.str());
  }
  BasicTensor<T> out(s);
  const long plane = static_cast<long>(s.h) * s.w;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const long off = (static_cast<long>(n) * s.c + c) * plane;
      const T b = bias.ptr()[c];
      for (long j = 0; j < plane; ++j) out.ptr()[off + j] = x.ptr()[off + j] + b;
    }
  }
  if (should_record(tape, {&x, &bias})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto bi = bias.impl();
    auto oi = out.impl();
    tape->record("add_bias", {xi, bi}, oi, [xi, bi, oi, s, plane] {
      if (xi->requires_grad) {
        xi->ensure_grad();
        for (std::size_t i = 0; i < xi->grad.size(); ++i) xi->grad[i] += oi->grad[i];
      }
      if (bi->requires_grad) {
        bi->ensure_grad();
        for (int n = 0; n < s.n; ++n) {
          for (int c = 0; c < s.c; ++c) {
            const T* go = oi->grad.data() + (static_cast<long>(n) * s.c + c) * plane;
            T acc = 0;
            for (long j = 0; j < plane; ++j) acc += go[j];
            bi->grad[c] += acc;
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> sum(Tape<T>* tape, const BasicTensor<T>& x) {
  double acc = 0;
  for (T v : x.data()) acc += v;
  BasicTensor<T> out = BasicTensor<T>::scalar(static_cast<T>(acc));
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("sum", {xi}, oi, [xi, oi] {
      xi->ensure_grad();
      for (auto& g : xi->grad) g += oi->grad[0];
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> l1_loss(Tape<T>* tape, const BasicTensor<T>& a,
                       const BasicTensor<T>& b) {
  require_same(a.shape(), b.shape(), "l1_loss");
  double acc = 0;
  for (std::size_t i = 0; i < a.numel(); ++i) {
    acc += std::abs(static_cast<double>(a.ptr()[i]) - b.ptr()[i]);
  }
  const double count = static_cast<double>(a.numel());
  BasicTensor<T> out = BasicTensor<T>::scalar(static_cast<T>(acc / count));
  if (should_record(tape, {&a, &b})) {
    out.set_requires_grad(true);
    auto ai = a.impl();
    auto bi = b.impl();
    auto oi = out.impl();
    tape->record("l1_loss", {ai, bi}, oi, [ai, bi, oi, count] {
      const T g = oi->grad[0] / static_cast<T>(count);
      if (ai->requires_grad) ai->ensure_grad();
      if (bi->requires_grad) bi->ensure_grad();
      for (std::size_t i = 0; i < ai->data.size(); ++i) {
        const T d = ai->data[i] - bi->data[i];
        const T sg = d > 0 ? g : (d < 0 ? -g : T(0));
        if (ai->requires_grad) ai->grad[i] += sg;
        if (bi->requires_grad) bi->grad[i] -= sg;
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> grad_map(Tape<T>* tape, const BasicTensor<T>& x) {
  const Shape s = x.shape();
  BasicTensor<T> out(Shape{2 * s.n, s.c, s.h, s.w});
  const long per_n = static_cast<long>(s.c) * s.h * s.w;
  const long vert = static_cast<long>(s.n) * per_n;
  for (int n = 0; n < s.n; ++n) {
    for (int c = 0; c < s.c; ++c) {
      const T* ip = x.ptr() + n * per_n + static_cast<long>(c) * s.h * s.w;
      T* gx = out.ptr() + n * per_n + static_cast<long>(c) * s.h * s.w;
      T* gy = gx + vert;
      for (int y = 0; y < s.h; ++y) {
        for (int xx = 0; xx < s.w; ++xx) {
          const long i = static_cast<long>(y) * s.w + xx;
          gx[i] = xx + 1 < s.w ? ip[i + 1] - ip[i] : T(0);
          gy[i] = y + 1 < s.h ? ip[i + s.w] - ip[i] : T(0);
        }
      }
    }
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("grad_map", {xi}, oi, [xi, oi, s, per_n, vert] {
      xi->ensure_grad();
      for (int n = 0; n < s.n; ++n) {
        for (int c = 0; c < s.c; ++c) {
          const long base = n * per_n + static_cast<long>(c) * s.h * s.w;
          T* gi = xi->grad.data() + base;
          const T* gx = oi->grad.data() + base;
          const T* gy = gx + vert;
          for (int y = 0; y < s.h; ++y) {
            for (int xx = 0; xx < s.w; ++xx) {
              const long i = static_cast<long>(y) * s.w + xx;
              if (xx + 1 < s.w) {
                gi[i + 1] += gx[i];
                gi[i] -= gx[i];
              }
              if (y + 1 < s.h) {
                gi[i + s.w] += gy[i];
                gi[i] -= gy[i];
              }
            }
          }
        }
      }
    });
  }
  return out;
}

namespace {

// Reflection without edge repeat; falls back to clamping for tiny extents.
int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

template <typename T>
BasicTensor<T> pad_reflect(Tape<T>* tape, const BasicTensor<T>& x, int bottom,
                           int right) {
  if (bottom < 0 || right < 0) {
    throw std::invalid_argument("pad_reflect: negative padding");
  }
  if (bottom == 0 && right == 0) return x;
  const Shape s = x.shape();
  const Shape os{s.n, s.c, s.h + bottom, s.w + right};
  BasicTensor<T> out(os);
  const long planes = static_cast<long>(s.n) * s.c;
  for (long p = 0; p < planes; ++p) {
    const T* ip = x.ptr() + p * s.h * s.w;
    T* op = out.ptr() + p * os.h * os.w;
    for (int y = 0; y < os.h; ++y) {
      const int sy = reflect_index(y, s.h);
      for (int xx = 0; xx < os.w; ++xx) {
        op[static_cast<long>(y) * os.w + xx] =
            ip[static_cast<long>(sy) * s.w + reflect_index(xx, s.w)];
      }
    }
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("pad_reflect", {xi}, oi, [xi, oi, s, os, planes] {
      xi->ensure_grad();
      for (long p = 0; p < planes; ++p) {
        T* gi = xi->grad.data() + p * s.h * s.w;
        const T* go = oi->grad.data() + p * os.h * os.w;
        for (int y = 0; y < os.h; ++y) {
          const int sy = reflect_index(y, s.h);
          for (int xx = 0; xx < os.w; ++xx) {
            gi[static_cast<long>(sy) * s.w + reflect_index(xx, s.w)] +=
                go[static_cast<long>(y) * os.w + xx];
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> crop(Tape<T>* tape, const BasicTensor<T>& x, int h, int w) {
  const Shape s = x.shape();
  if (h <= 0 || w <= 0 || h > s.h || w > s.w) {
    throw std::invalid_argument("crop: window larger than " + s.str());
  }
  if (h == s.h && w == s.w) return x;
  const Shape os{s.n, s.c, h, w};
  BasicTensor<T> out(os);
  const long planes = static_cast<long>(s.n) * s.c;
  for (long p = 0; p < planes; ++p) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(x.ptr() + p * s.h * s.w + static_cast<long>(y) * s.w, w,
                  out.ptr() + p * h * w + static_cast<long>(y) * w);
    }
  }
  if (should_record(tape, {&x})) {
    out.set_requires_grad(true);
    auto xi = x.impl();
    auto oi = out.impl();
    tape->record("crop", {xi}, oi, [xi, oi, s, h, w, planes] {
      xi->ensure_grad();
      for (long p = 0; p < planes; ++p) {
        for (int y = 0; y < h; ++y) {
          T* gi = xi->grad.data() + p * s.h * s.w + static_cast<long>(y) * s.w;
          const T* go = oi->grad.data() + p * h * w + static_cast<long>(y) * w;
          for (int xx = 0; xx < w; ++xx) gi[xx] += go[xx];
        }
      }
    });
  }
  return out;
}

template <typename T>
BasicTensor<T> channel_max(const BasicTensor<T>& x) {
  const Shape s = x.shape();
  BasicTensor<T> out(Shape{s.n, 1, s.h, s.w});
  const long plane = static_cast<long>(s.h) * s.w;
  for (int n = 0; n < s.n; ++n) {
    T* o = out.ptr() + n * plane;
    const T* base = x.ptr() + static_cast<long>(n) * s.c * plane;
    std::copy_n(base, plane, o);
    for (int c = 1; c < s.c; ++c) {
      const T* ip = base + c * plane;
      for (long j = 0; j < plane; ++j) o[j] = std::max(o[j], ip[j]);
    }
  }
  return out;
}

template <typename T>
void window_sums(const BasicTensor<T>& map, const ConvSpec& spec,
                 BasicTensor<T>& sums, BasicTensor<T>& in_bounds) {
  const Shape s = map.shape();
  if (s.c != 1) throw std::invalid_argument("window_sums: map must have 1 channel");
  const int ho = spec.out_size(s.h);
  const int wo = spec.out_size(s.w);
  sums = BasicTensor<T>(Shape{s.n, 1, ho, wo});
  in_bounds = BasicTensor<T>(Shape{s.n, 1, ho, wo});
  for (int n = 0; n < s.n; ++n) {
    for (int y = 0; y < ho; ++y) {
      for (int xx = 0; xx < wo; ++xx) {
        T acc = 0;
        int count = 0;
        for (int ky = 0; ky < spec.kernel; ++ky) {
          const int iy = y * spec.stride - spec.padding + ky;
          if (iy < 0 || iy >= s.h) continue;
          for (int kx = 0; kx < spec.kernel; ++kx) {
            const int ix = xx * spec.stride - spec.padding + kx;
            if (ix < 0 || ix >= s.w) continue;
            acc += map.at(n, 0, iy, ix);
            ++count;
          }
        }
        sums.at(n, 0, y, xx) = acc;
        in_bounds.at(n, 0, y, xx) = static_cast<T>(count);
      }
    }
  }
}

#define LHDR_INSTANTIATE_OPS(T)                                                  \
  template BasicTensor<T> leaky_relu(Tape<T>*, const BasicTensor<T>&, double);   \
  template BasicTensor<T> relu(Tape<T>*, const BasicTensor<T>&);                 \
  template BasicTensor<T> activation(Tape<T>*, const BasicTensor<T>&,            \
                                     ActivationKind, double);                    \
  template BasicTensor<T> resample(Tape<T>*, const BasicTensor<T>&, Resample);   \
  template BasicTensor<T> concat_channels(Tape<T>*, const BasicTensor<T>&,       \
                                          const BasicTensor<T>&);                \
  template BasicTensor<T> slice_channels(Tape<T>*, const BasicTensor<T>&, int,   \
                                         int);                                   \
  template BasicTensor<T> global_avg_pool(Tape<T>*, const BasicTensor<T>&);      \
  template BasicTensor<T> add(Tape<T>*, const BasicTensor<T>&,                   \
                              const BasicTensor<T>&);                            \
  template BasicTensor<T> mul(Tape<T>*, const BasicTensor<T>&,                   \
                              const BasicTensor<T>&);                            \
  template BasicTensor<T> add_scalar(Tape<T>*, const BasicTensor<T>&, double);   \
  template BasicTensor<T> scale(Tape<T>*, const BasicTensor<T>&, double);        \
  template BasicTensor<T> mul_map(Tape<T>*, const BasicTensor<T>&,               \
                                  const BasicTensor<T>&);                        \
  template BasicTensor<T> add_bias(Tape<T>*, const BasicTensor<T>&,              \
                                   const BasicTensor<T>&);                       \
  template BasicTensor<T> sum(Tape<T>*, const BasicTensor<T>&);                  \
  template BasicTensor<T> l1_loss(Tape<T>*, const BasicTensor<T>&,               \
                                  const BasicTensor<T>&);                        \
  template BasicTensor<T> grad_map(Tape<T>*, const BasicTensor<T>&);             \
  template BasicTensor<T> pad_reflect(Tape<T>*, const BasicTensor<T>&, int, int); \
  template BasicTensor<T> crop(Tape<T>*, const BasicTensor<T>&, int, int);       \
  template BasicTensor<T> channel_max(const BasicTensor<T>&);                    \
  template void window_sums(const BasicTensor<T>&, const ConvSpec&,              \
                            BasicTensor<T>&, BasicTensor<T>&);

LHDR_INSTANTIATE_OPS(float)
LHDR_INSTANTIATE_OPS(double)

}  // namespace lhdr::ops
