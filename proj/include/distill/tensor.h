//
// Copyright 2026 The bilstm-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DISTILL_TENSOR_H_
#define DISTILL_TENSOR_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace distill {

// Dimensions of a dense tensor. The empty shape denotes a scalar.
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> value;
  // Sized like `value` iff requires_grad.
  std::vector<T> grad;
  bool requires_grad = false;
  // Set once backward has been run from this node; cleared by zero_grad().
  bool backward_done = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return inputs.empty(); }
};

}  // namespace detail

// A dense row-major tensor of rank 0, 1 or 2 that records the operations
// producing it, so that gradients can be accumulated by reverse-mode
// differentiation. Copies share the underlying storage; use clone() for a
// deep copy.
//
// T is float for training and double for gradient checking.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);
  explicit Tensor(std::shared_ptr<detail::Node<T>> node)
      : node_(std::move(node)) {}

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor scalar(T value, bool requires_grad = false);
  static Tensor vector(std::vector<T> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<T> values, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t size() const { return node_->value.size(); }
  // Rows and columns of a rank-2 tensor; a rank-1 tensor is one row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const T> values() const { return node_->value; }
  std::span<T> mutable_values() { return node_->value; }
  T item() const;
  T at(std::size_t i) const { return node_->value.at(i); }
  T at(std::size_t r, std::size_t c) const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool requires_grad);
  // Empty span when the tensor does not require a gradient.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> mutable_grad() { return node_->grad; }
  void zero_grad();

  // Accumulates d(this)/d(leaf) into every requires_grad leaf reachable from
  // this scalar. May run once per graph; a second call throws GraphError
  // unless zero_grad() was called on this tensor in between.
  void backward();

  // Same values, no history, requires_grad = false.
  Tensor detach() const;
  // Deep copy of values (and grad buffer) with the same requires_grad flag.
  // The copy is a leaf.
  Tensor clone() const;

  bool shares_storage_with(const Tensor& other) const {
    return node_ == other.node_;
  }
  const std::shared_ptr<detail::Node<T>>& node() const { return node_; }

 private:
  std::shared_ptr<detail::Node<T>> node_;
};

// While alive, operations on the current thread do not record history.
// Used for inference.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

  static bool grad_enabled();

 private:
  bool previous_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace distill

#endif  // DISTILL_TENSOR_H_
