// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace lhdr {

/// Dimensions of a 4-D tensor in (batch, channel, height, width) order.
struct Shape {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  std::size_t numel() const {
    return static_cast<std::size_t>(n) * c * h * w;
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

template <typename T>
struct TensorImpl {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until a gradient has been accumulated
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.empty()) grad.assign(data.size(), T(0));
  }
};

/// Dense float tensor handle. Copies alias the same storage (like a shared
/// buffer); use clone() for an independent copy.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, bool requires_grad = false);
  BasicTensor(Shape shape, std::vector<T> data, bool requires_grad = false);

  static BasicTensor zeros(Shape shape, bool requires_grad = false) {
    return BasicTensor(shape, requires_grad);
  }
  static BasicTensor full(Shape shape, T value, bool requires_grad = false);
  static BasicTensor scalar(T value) { return full(Shape{}, value); }

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  int n() const { return impl_->shape.n; }
  int c() const { return impl_->shape.c; }
  int h() const { return impl_->shape.h; }
  int w() const { return impl_->shape.w; }
  std::size_t numel() const { return impl_->data.size(); }

  std::span<T> data() { return impl_->data; }
  std::span<const T> data() const { return impl_->data; }
  T* ptr() { return impl_->data.data(); }
  const T* ptr() const { return impl_->data.data(); }

  bool has_grad() const { return defined() && !impl_->grad.empty(); }
  std::span<T> grad() { return impl_->grad; }
  std::span<const T> grad() const { return impl_->grad; }
  void zero_grad() { impl_->grad.clear(); }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on) { impl_->requires_grad = on; }

  std::size_t offset(int n, int c, int h, int w) const {
    const Shape& s = impl_->shape;
    return ((static_cast<std::size_t>(n) * s.c + c) * s.h + h) * s.w + w;
  }
  T& at(int n, int c, int h, int w) { return impl_->data[offset(n, c, h, w)]; }
  T at(int n, int c, int h, int w) const {
    return impl_->data[offset(n, c, h, w)];
  }
  T item() const;

  /// Deep copy without gradient or tape history.
  BasicTensor clone() const;

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(impl_->data.begin(), impl_->data.end());
    return BasicTensor<U>(impl_->shape, std::move(out), impl_->requires_grad);
  }

  const std::shared_ptr<TensorImpl<T>>& impl() const { return impl_; }
  static BasicTensor wrap(std::shared_ptr<TensorImpl<T>> impl) {
    BasicTensor t;
    t.impl_ = std::move(impl);
    return t;
  }

 private:
  std::shared_ptr<TensorImpl<T>> impl_;
};

using Tensor = BasicTensor<float>;
using Tensor64 = BasicTensor<double>;

/// Define-by-run record of differentiable ops. Nodes are appended after
/// their inputs exist, so insertion order is a topological order.
template <typename T>
class Tape {
 public:
  using ImplPtr = std::shared_ptr<TensorImpl<T>>;

  struct Node {
    std::string op;
    std::vector<ImplPtr> inputs;
    ImplPtr output;
    std::function<void()> backward;
  };

  void record(std::string op, std::vector<ImplPtr> inputs, ImplPtr output,
              std::function<void()> backward);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  std::vector<Node> nodes_;
};

/// Reverse pass over the tape seeded with dLoss/dLoss = 1. Leaf tensors that
/// require grad accumulate dLoss/dLeaf; intermediate grads are released.
template <typename T>
void backward(Tape<T>& tape, const BasicTensor<T>& loss);

/// True if any input requires grad and a tape is recording.
template <typename T>
bool should_record(const Tape<T>* tape,
                   std::initializer_list<const BasicTensor<T>*> inputs);

#ifndef NDEBUG
template <typename T>
void debug_check_finite(const BasicTensor<T>& t, const char* op);
#else
template <typename T>
inline void debug_check_finite(const BasicTensor<T>&, const char*) {}
#endif

}  // namespace lhdr
