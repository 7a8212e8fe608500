// Copyright 2026 The LHDR Lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "lhdr/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lhdr {

std::string Shape::str() const {
  std::ostringstream os;
  os << n << "x" << c << "x" << h << "x" << w;
  return os.str();
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, bool requires_grad)
    : impl_(std::make_shared<TensorImpl<T>>()) {
  if (shape.n <= 0 || shape.c <= 0 || shape.h <= 0 || shape.w <= 0) {
    throw std::invalid_argument("tensor dims must be positive, got " +
                                shape.str());
  }
  impl_->shape = shape;
  impl_->data.assign(shape.numel(), T(0));
  impl_->requires_grad = requires_grad;
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data,
                            bool requires_grad)
    : impl_(std::make_shared<TensorImpl<T>>()) {
  if (shape.n <= 0 || shape.c <= 0 || shape.h <= 0 || shape.w <= 0) {
    throw std::invalid_argument("tensor dims must be positive, got " +
                                shape.str());
  }
  if (data.size() != shape.numel()) {
    throw std::invalid_argument("data length " + std::to_string(data.size()) +
                                " does not match dims " + shape.str());
  }
  impl_->shape = shape;
  impl_->data = std::move(data);
  impl_->requires_grad = requires_grad;
}

template <typename T>
BasicTensor<T> BasicTensor<T>::full(Shape shape, T value, bool requires_grad) {
  BasicTensor t(shape, requires_grad);
  std::fill(t.impl_->data.begin(), t.impl_->data.end(), value);
  return t;
}

template <typename T>
T BasicTensor<T>::item() const {
  if (impl_->data.size() != 1) {
    throw std::logic_error("item() on non-scalar tensor " + shape().str());
  }
  return impl_->data[0];
}

template <typename T>
BasicTensor<T> BasicTensor<T>::clone() const {
  return BasicTensor(impl_->shape, impl_->data, false);
}

template <typename T>
void Tape<T>::record(std::string op, std::vector<ImplPtr> inputs,
                     ImplPtr output, std::function<void()> backward) {
  nodes_.push_back(
      Node{std::move(op), std::move(inputs), std::move(output), std::move(backward)});
}

template <typename T>
void backward(Tape<T>& tape, const BasicTensor<T>& loss) {
  if (!loss.defined() || loss.numel() != 1 || !(loss.shape() == Shape{})) {
    throw std::invalid_argument("backward() needs a 1x1x1x1 loss, got " +
                                (loss.defined() ? loss.shape().str()
                                                : std::string("undefined")));
  }
  const auto& nodes = tape.nodes();
  bool on_tape = false;
  for (const auto& node : nodes) {
    if (node.output == loss.impl()) on_tape = true;
  }
  if (!on_tape) {
    throw std::invalid_argument("loss was not produced on this tape");
  }

  loss.impl()->ensure_grad();
  loss.impl()->grad[0] += T(1);

  for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
    if (it->output->grad.empty()) continue;
    it->backward();
    // Intermediate gradients are not needed once propagated.
    it->output->grad.clear();
    it->output->grad.shrink_to_fit();
  }
  tape.clear();
}

template <typename T>
bool should_record(const Tape<T>* tape,
                   std::initializer_list<const BasicTensor<T>*> inputs) {
  if (tape == nullptr) return false;
  for (const auto* t : inputs) {
    if (t != nullptr && t->defined() && t->requires_grad()) return true;
  }
  return false;
}

#ifndef NDEBUG
template <typename T>
void debug_check_finite(const BasicTensor<T>& t, const char* op) {
  for (T v : t.data()) {
    assert(std::isfinite(v) && op);
    (void)v;
    (void)op;
  }
}
template void debug_check_finite(const BasicTensor<float>&, const char*);
template void debug_check_finite(const BasicTensor<double>&, const char*);
#endif

template class BasicTensor<float>;
template class BasicTensor<double>;
template class Tape<float>;
template class Tape<double>;
template void backward(Tape<float>&, const BasicTensor<float>&);
template void backward(Tape<double>&, const BasicTensor<double>&);
template bool should_record(const Tape<float>*,
                            std::initializer_list<const BasicTensor<float>*>);
template bool should_record(const Tape<double>*,
                            std::initializer_list<const BasicTensor<double>*>);

}  // namespace lhdr
