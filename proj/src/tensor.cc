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

#include "distill/tensor.h"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "distill/errors.h"

namespace distill {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool NoGradGuard::grad_enabled() { return g_grad_enabled; }

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad)
    : node_(std::make_shared<detail::Node<T>>()) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw DimensionError("tensor dimensions must be positive, got " +
                           shape_to_string(shape));
    }
  }
  if (shape.size() > 2) {
    throw DimensionError("only ranks 0, 1 and 2 are supported, got " +
                         shape_to_string(shape));
  }
  if (shape_size(shape) != values.size()) {
    throw DimensionError("shape " + shape_to_string(shape) + " needs " +
                         std::to_string(shape_size(shape)) + " values, got " +
                         std::to_string(values.size()));
  }
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  set_requires_grad(requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = shape_size(shape);
  return Tensor(std::move(shape), std::vector<T>(n, T{0}), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value, bool requires_grad) {
  return Tensor(Shape{}, std::vector<T>{value}, requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::vector(std::vector<T> values, bool requires_grad) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values), requires_grad);
}

template <typename T>
Tensor<T> Tensor<T>::matrix(std::size_t rows, std::size_t cols,
                            std::vector<T> values, bool requires_grad) {
  return Tensor(Shape{rows, cols}, std::move(values), requires_grad);
}

template <typename T>
std::size_t Tensor<T>::rows() const {
  return rank() == 2 ? node_->shape[0] : 1;
}

template <typename T>
std::size_t Tensor<T>::cols() const {
  if (rank() == 0) return 1;
  return node_->shape.back();
}

template <typename T>
T Tensor<T>::item() const {
  if (size() != 1) {
    throw DimensionError("item() needs a single-element tensor, got " +
                         shape_to_string(shape()));
  }
  return node_->value[0];
}

template <typename T>
T Tensor<T>::at(std::size_t r, std::size_t c) const {
  if (rank() != 2 || r >= rows() || c >= cols()) {
    throw DimensionError("index (" + std::to_string(r) + "," +
                         std::to_string(c) + ") out of range for " +
                         shape_to_string(shape()));
  }
  return node_->value[r * cols() + c];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool requires_grad) {
  node_->requires_grad = requires_grad;
  if (requires_grad) {
    node_->grad.assign(node_->value.size(), T{0});
  } else {
    node_->grad.clear();
  }
}

template <typename T>
void Tensor<T>::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), T{0});
  node_->backward_done = false;
}

template <typename T>
void Tensor<T>::backward() {
  using NodeT = detail::Node<T>;
  if (!defined()) throw GraphError("backward() on an undefined tensor");
  if (size() != 1) {
    throw GraphError("backward() needs a scalar loss, got shape " +
                     shape_to_string(shape()));
  }
  if (!node_->requires_grad) {
    throw GraphError(
        "backward() on a tensor that does not depend on any parameter");
  }
  if (node_->backward_done) {
    throw GraphError(
        "backward() already ran on this graph; call zero_grad() first");
  }

  // Iterative post-order DFS over nodes that carry gradients.
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> visited;
  std::vector<std::pair<NodeT*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      NodeT* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (NodeT* node : order) {
    if (!node->is_leaf()) std::fill(node->grad.begin(), node->grad.end(), T{0});
  }
  node_->grad.assign(1, T{1});
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeT* node = *it;
    if (node->backward_fn) node->backward_fn(*node);
  }
  node_->backward_done = true;
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(node_->shape, node_->value, false);
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  Tensor copy(node_->shape, node_->value, node_->requires_grad);
  if (node_->requires_grad) copy.node_->grad = node_->grad;
  return copy;
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace distill
