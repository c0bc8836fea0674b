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

#ifndef DISTILL_OPS_H_
#define DISTILL_OPS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "distill/tensor.h"

// Differentiable operations over Tensor<T>. Shapes must match exactly; there
// is no implicit broadcasting (bias addition goes through replicate_rows).
// Every op throws DimensionError on a shape mismatch, naming both shapes.
namespace distill {

enum class ElementwiseOp { kAdd, kSub, kMul, kAbsDiff };
enum class Activation { kSigmoid, kTanh, kRelu };

// [m x n] . [n x p] -> [m x p].
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

// kAbsDiff computes |a - b| with the sign(0) = 0 subgradient.
template <typename T>
Tensor<T> elementwise(ElementwiseOp op, const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(ElementwiseOp::kAdd, a, b);
}
template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(ElementwiseOp::kSub, a, b);
}
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(ElementwiseOp::kMul, a, b);
}
template <typename T>
Tensor<T> abs_diff(const Tensor<T>& a, const Tensor<T>& b) {
  return elementwise(ElementwiseOp::kAbsDiff, a, b);
}

// relu'(0) = 0.
template <typename T>
Tensor<T> activation(Activation op, const Tensor<T>& a);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& a) {
  return activation(Activation::kSigmoid, a);
}
template <typename T>
Tensor<T> tanh(const Tensor<T>& a) {
  return activation(Activation::kTanh, a);
}
template <typename T>
Tensor<T> relu(const Tensor<T>& a) {
  return activation(Activation::kRelu, a);
}

// Softmax along the last axis (each row of a matrix independently), with
// max subtraction. Throws NumericError on NaN input.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

// Concatenation along the last axis. Parts are all rank 1, or all rank 2
// with the same number of rows. Throws DimensionError on an empty list.
template <typename T>
Tensor<T> concat(std::span<const Tensor<T>> parts);

template <typename T>
Tensor<T> concat(std::initializer_list<Tensor<T>> parts) {
  return concat(std::span<const Tensor<T>>(parts.begin(), parts.size()));
}

// Scalar sum of all entries.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

// a * factor.
template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

// [n] -> [rows x n], each row a copy of `v`.
template <typename T>
Tensor<T> replicate_rows(const Tensor<T>& v, std::size_t rows);

// Columns [start, start + count) of a matrix (or elements of a vector).
template <typename T>
Tensor<T> slice_cols(const Tensor<T>& a, std::size_t start, std::size_t count);

// Rows of `table` picked by `indices`: [V x d] -> [indices.size() x d].
// Row 0 is the padding row and never receives gradient.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::int32_t> indices);

// Row r of the result is row r of `when_true` if take_first[r], else row r
// of `when_false`. Both inputs are [rows x n].
template <typename T>
Tensor<T> select_rows(std::span<const char> take_first,
                      const Tensor<T>& when_true, const Tensor<T>& when_false);

// Same values under a new shape with the same element count.
template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape);

// Sum over all entries of (a - target)^2; target is a constant.
template <typename T>
Tensor<T> squared_distance(const Tensor<T>& a, std::span<const T> target);

// Sum over rows of -log softmax(row)[labels[row]], computed with log-sum-exp.
// A rank-1 input is a single row.
template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits,
                                std::span<const std::size_t> labels);

}  // namespace distill

#endif  // DISTILL_OPS_H_
