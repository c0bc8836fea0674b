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

#include "distill/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "distill/errors.h"

namespace distill {
namespace {

template <typename T>
using NodePtr = std::shared_ptr<detail::Node<T>>;

// Wraps a freshly computed value in a node. History is recorded only if
// gradients are enabled and some input requires a gradient.
template <typename T, typename Backward>
Tensor<T> record(Shape shape, std::vector<T> value,
                 std::vector<NodePtr<T>> inputs, Backward&& backward) {
  auto node = std::make_shared<detail::Node<T>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  const bool needs_grad =
      NoGradGuard::grad_enabled() &&
      std::any_of(inputs.begin(), inputs.end(),
                  [](const NodePtr<T>& n) { return n->requires_grad; });
  if (needs_grad) {
    node->requires_grad = true;
    node->grad.assign(node->value.size(), T{0});
    node->inputs = std::move(inputs);
    node->backward_fn = std::forward<Backward>(backward);
  }
  return Tensor<T>(std::move(node));
}

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_to_string(a.shape()) + " vs " +
                         shape_to_string(b.shape()));
  }
}

template <typename T>
void require_defined(const char* op, const Tensor<T>& a) {
  if (!a.defined()) throw DimensionError(std::string(op) + ": undefined tensor");
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_defined("matmul", a);
  require_defined("matmul", b);
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: cannot multiply " +
                         shape_to_string(a.shape()) + " by " +
                         shape_to_string(b.shape()));
  }
  const std::size_t m = a.rows(), n = a.cols(), p = b.cols();
  std::vector<T> out(m * p, T{0});
  const T* av = a.values().data();
  const T* bv = b.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    T* row = out.data() + i * p;
    for (std::size_t k = 0; k < n; ++k) {
      const T aik = av[i * n + k];
      const T* brow = bv + k * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += aik * brow[j];
    }
  }
  return record<T>(
      Shape{m, p}, std::move(out), {a.node(), b.node()},
      [m, n, p](detail::Node<T>& self) {
        auto& an = *self.inputs[0];
        auto& bn = *self.inputs[1];
        const T* g = self.grad.data();
        if (an.requires_grad) {
          // dA = dC . B^T
          for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
              const T* brow = bn.value.data() + k * p;
              const T* grow = g + i * p;
              T acc{0};
              for (std::size_t j = 0; j < p; ++j) acc += grow[j] * brow[j];
              an.grad[i * n + k] += acc;
            }
          }
        }
        if (bn.requires_grad) {
          // dB = A^T . dC
          for (std::size_t i = 0; i < m; ++i) {
            const T* grow = g + i * p;
            for (std::size_t k = 0; k < n; ++k) {
              const T aik = an.value[i * n + k];
              T* bgrad = bn.grad.data() + k * p;
              for (std::size_t j = 0; j < p; ++j) bgrad[j] += aik * grow[j];
            }
          }
        }
      });
}

template <typename T>
Tensor<T> elementwise(ElementwiseOp op, const Tensor<T>& a, const Tensor<T>& b) {
  require_defined("elementwise", a);
  require_defined("elementwise", b);
  require_same_shape("elementwise", a, b);
  const std::size_t n = a.size();
  std::vector<T> out(n);
  const auto av = a.values();
  const auto bv = b.values();
  switch (op) {
    case ElementwiseOp::kAdd:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i] + bv[i];
      break;
    case ElementwiseOp::kSub:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i] - bv[i];
      break;
    case ElementwiseOp::kMul:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i] * bv[i];
      break;
    case ElementwiseOp::kAbsDiff:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(av[i] - bv[i]);
      break;
  }
  return record<T>(
      a.shape(), std::move(out), {a.node(), b.node()},
      [op, n](detail::Node<T>& self) {
        auto& an = *self.inputs[0];
        auto& bn = *self.inputs[1];
        const auto& g = self.grad;
        switch (op) {
          case ElementwiseOp::kAdd:
            if (an.requires_grad)
              for (std::size_t i = 0; i < n; ++i) an.grad[i] += g[i];
            if (bn.requires_grad)
              for (std::size_t i = 0; i < n; ++i) bn.grad[i] += g[i];
            break;
          case ElementwiseOp::kSub:
            if (an.requires_grad)
              for (std::size_t i = 0; i < n; ++i) an.grad[i] += g[i];
            if (bn.requires_grad)
              for (std::size_t i = 0; i < n; ++i) bn.grad[i] -= g[i];
            break;
          case ElementwiseOp::kMul:
            if (an.requires_grad)
              for (std::size_t i = 0; i < n; ++i) an.grad[i] += g[i] * bn.value[i];
            if (bn.requires_grad)
              for (std::size_t i = 0; i < n; ++i) bn.grad[i] += g[i] * an.value[i];
            break;
          case ElementwiseOp::kAbsDiff:
            for (std::size_t i = 0; i < n; ++i) {
              const T d = an.value[i] - bn.value[i];
              const T sign = d > T{0} ? T{1} : (d < T{0} ? T{-1} : T{0});
              if (an.requires_grad) an.grad[i] += g[i] * sign;
              if (bn.requires_grad) bn.grad[i] -= g[i] * sign;
            }
            break;
        }
      });
}

template <typename T>
Tensor<T> activation(Activation op, const Tensor<T>& a) {
  require_defined("activation", a);
  const std::size_t n = a.size();
  std::vector<T> out(n);
  const auto av = a.values();
  switch (op) {
    case Activation::kSigmoid:
      for (std::size_t i = 0; i < n; ++i) out[i] = T{1} / (T{1} + std::exp(-av[i]));
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(av[i]);
      break;
    case Activation::kRelu:
      for (std::size_t i = 0; i < n; ++i) out[i] = av[i] > T{0} ? av[i] : T{0};
      break;
  }
  return record<T>(a.shape(), std::move(out), {a.node()},
                   [op, n](detail::Node<T>& self) {
                     auto& an = *self.inputs[0];
                     const auto& y = self.value;
                     const auto& g = self.grad;
                     switch (op) {
                       case Activation::kSigmoid:
                         for (std::size_t i = 0; i < n; ++i)
                           an.grad[i] += g[i] * y[i] * (T{1} - y[i]);
                         break;
                       case Activation::kTanh:
                         for (std::size_t i = 0; i < n; ++i)
                           an.grad[i] += g[i] * (T{1} - y[i] * y[i]);
                         break;
                       case Activation::kRelu:
                         for (std::size_t i = 0; i < n; ++i)
                           if (an.value[i] > T{0}) an.grad[i] += g[i];
                         break;
                     }
                   });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  require_defined("softmax", logits);
  if (logits.rank() == 0) {
    throw DimensionError("softmax: needs a vector or matrix, got a scalar");
  }
  const std::size_t rows = logits.rows(), cols = logits.cols();
  const auto z = logits.values();
  std::vector<T> out(z.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = z.data() + r * cols;
    T* y = out.data() + r * cols;
    T peak = -std::numeric_limits<T>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
      if (std::isnan(in[c])) throw NumericError("softmax: NaN logit");
      peak = std::max(peak, in[c]);
    }
    T total{0};
    for (std::size_t c = 0; c < cols; ++c) {
      y[c] = std::exp(in[c] - peak);
      total += y[c];
    }
    for (std::size_t c = 0; c < cols; ++c) y[c] /= total;
  }
  return record<T>(logits.shape(), std::move(out), {logits.node()},
                   [rows, cols](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t r = 0; r < rows; ++r) {
                       const T* y = self.value.data() + r * cols;
                       const T* g = self.grad.data() + r * cols;
                       T dot{0};
                       for (std::size_t c = 0; c < cols; ++c) dot += g[c] * y[c];
                       for (std::size_t c = 0; c < cols; ++c)
                         in.grad[r * cols + c] += y[c] * (g[c] - dot);
                     }
                   });
}

template <typename T>
Tensor<T> concat(std::span<const Tensor<T>> parts) {
  if (parts.empty()) throw DimensionError("concat: empty list of tensors");
  const std::size_t rank = parts.front().rank();
  if (rank != 1 && rank != 2) {
    throw DimensionError("concat: parts must be vectors or matrices, got " +
                         shape_to_string(parts.front().shape()));
  }
  const std::size_t rows = parts.front().rows();
  std::vector<std::size_t> widths;
  std::vector<NodePtr<T>> inputs;
  std::size_t total = 0;
  for (const Tensor<T>& part : parts) {
    require_defined("concat", part);
    if (part.rank() != rank || part.rows() != rows) {
      throw DimensionError("concat: incompatible shapes " +
                           shape_to_string(parts.front().shape()) + " and " +
                           shape_to_string(part.shape()));
    }
    widths.push_back(part.cols());
    inputs.push_back(part.node());
    total += part.cols();
  }
  std::vector<T> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto v = parts[p].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * widths[p], widths[p],
                  out.data() + r * total + offset);
    }
    offset += widths[p];
  }
  Shape shape = rank == 1 ? Shape{total} : Shape{rows, total};
  return record<T>(std::move(shape), std::move(out), std::move(inputs),
                   [rows, total, widths](detail::Node<T>& self) {
                     std::size_t offset = 0;
                     for (std::size_t p = 0; p < widths.size(); ++p) {
                       auto& in = *self.inputs[p];
                       if (in.requires_grad) {
                         for (std::size_t r = 0; r < rows; ++r) {
                           const T* g = self.grad.data() + r * total + offset;
                           T* dst = in.grad.data() + r * widths[p];
                           for (std::size_t c = 0; c < widths[p]; ++c) dst[c] += g[c];
                         }
                       }
                       offset += widths[p];
                     }
                   });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  require_defined("sum", a);
  T total{0};
  for (T v : a.values()) total += v;
  return record<T>(Shape{}, {total}, {a.node()}, [](detail::Node<T>& self) {
    auto& in = *self.inputs[0];
    const T g = self.grad[0];
    for (T& d : in.grad) d += g;
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  require_defined("scale", a);
  std::vector<T> out(a.values().begin(), a.values().end());
  for (T& v : out) v *= factor;
  return record<T>(a.shape(), std::move(out), {a.node()},
                   [factor](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t i = 0; i < in.grad.size(); ++i)
                       in.grad[i] += self.grad[i] * factor;
                   });
}

template <typename T>
Tensor<T> replicate_rows(const Tensor<T>& v, std::size_t rows) {
  require_defined("replicate_rows", v);
  if (v.rank() != 1 || rows == 0) {
    throw DimensionError("replicate_rows: needs a vector and rows > 0, got " +
                         shape_to_string(v.shape()));
  }
  const std::size_t n = v.size();
  std::vector<T> out(rows * n);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(v.values().begin(), v.values().end(), out.begin() + r * n);
  }
  return record<T>(Shape{rows, n}, std::move(out), {v.node()},
                   [rows, n](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t c = 0; c < n; ++c)
                         in.grad[c] += self.grad[r * n + c];
                   });
}

template <typename T>
Tensor<T> slice_cols(const Tensor<T>& a, std::size_t start, std::size_t count) {
  require_defined("slice_cols", a);
  if (a.rank() == 0 || count == 0 || start + count > a.cols()) {
    throw DimensionError("slice_cols: columns [" + std::to_string(start) + ", " +
                         std::to_string(start + count) + ") out of range for " +
                         shape_to_string(a.shape()));
  }
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<T> out(rows * count);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(a.values().data() + r * cols + start, count,
                out.data() + r * count);
  }
  Shape shape = a.rank() == 1 ? Shape{count} : Shape{rows, count};
  return record<T>(std::move(shape), std::move(out), {a.node()},
                   [rows, cols, start, count](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t c = 0; c < count; ++c)
                         in.grad[r * cols + start + c] += self.grad[r * count + c];
                   });
}

template <typename T>
Tensor<T> gather_rows(const Tensor<T>& table, std::span<const std::int32_t> indices) {
  require_defined("gather_rows", table);
  if (table.rank() != 2 || indices.empty()) {
    throw DimensionError("gather_rows: needs a matrix and at least one index, got " +
                         shape_to_string(table.shape()));
  }
  const std::size_t vocab = table.rows(), dim = table.cols();
  std::vector<std::int32_t> idx(indices.begin(), indices.end());
  std::vector<T> out(idx.size() * dim);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (idx[r] < 0 || static_cast<std::size_t>(idx[r]) >= vocab) {
      throw DimensionError("gather_rows: index " + std::to_string(idx[r]) +
                           " out of range for table " +
                           shape_to_string(table.shape()));
    }
    std::copy_n(table.values().data() + idx[r] * dim, dim, out.data() + r * dim);
  }
  const std::size_t n = idx.size();
  return record<T>(Shape{n, dim}, std::move(out), {table.node()},
                   [idx = std::move(idx), dim](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t r = 0; r < idx.size(); ++r) {
                       if (idx[r] == 0) continue;  // padding row stays frozen
                       T* dst = in.grad.data() + idx[r] * dim;
                       const T* g = self.grad.data() + r * dim;
                       for (std::size_t c = 0; c < dim; ++c) dst[c] += g[c];
                     }
                   });
}

template <typename T>
Tensor<T> select_rows(std::span<const char> take_first, const Tensor<T>& when_true,
                      const Tensor<T>& when_false) {
  require_defined("select_rows", when_true);
  require_defined("select_rows", when_false);
  require_same_shape("select_rows", when_true, when_false);
  if (when_true.rank() != 2 || take_first.size() != when_true.rows()) {
    throw DimensionError("select_rows: " + std::to_string(take_first.size()) +
                         " flags for shape " + shape_to_string(when_true.shape()));
  }
  const std::size_t rows = when_true.rows(), cols = when_true.cols();
  std::vector<char> mask(take_first.begin(), take_first.end());
  std::vector<T> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& src = mask[r] ? when_true : when_false;
    std::copy_n(src.values().data() + r * cols, cols, out.data() + r * cols);
  }
  return record<T>(when_true.shape(), std::move(out),
                   {when_true.node(), when_false.node()},
                   [mask = std::move(mask), cols](detail::Node<T>& self) {
                     for (std::size_t r = 0; r < mask.size(); ++r) {
                       auto& in = *self.inputs[mask[r] ? 0 : 1];
                       if (!in.requires_grad) continue;
                       for (std::size_t c = 0; c < cols; ++c)
                         in.grad[r * cols + c] += self.grad[r * cols + c];
                     }
                   });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  require_defined("reshape", a);
  if (shape_size(shape) != a.size() || shape.size() > 2) {
    throw DimensionError("reshape: cannot view " + shape_to_string(a.shape()) +
                         " as " + shape_to_string(shape));
  }
  std::vector<T> out(a.values().begin(), a.values().end());
  return record<T>(std::move(shape), std::move(out), {a.node()},
                   [](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     for (std::size_t i = 0; i < in.grad.size(); ++i)
                       in.grad[i] += self.grad[i];
                   });
}

template <typename T>
Tensor<T> squared_distance(const Tensor<T>& a, std::span<const T> target) {
  require_defined("squared_distance", a);
  if (target.size() != a.size()) {
    throw DimensionError("squared_distance: shape " + shape_to_string(a.shape()) +
                         " vs target of length " + std::to_string(target.size()));
  }
  std::vector<T> diff(a.size());
  T total{0};
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = a.values()[i] - target[i];
    total += diff[i] * diff[i];
  }
  return record<T>(Shape{}, {total}, {a.node()},
                   [diff = std::move(diff)](detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     const T g = self.grad[0];
                     for (std::size_t i = 0; i < diff.size(); ++i)
                       in.grad[i] += g * T{2} * diff[i];
                   });
}

template <typename T>
Tensor<T> softmax_cross_entropy(const Tensor<T>& logits,
                                std::span<const std::size_t> labels) {
  require_defined("softmax_cross_entropy", logits);
  if (logits.rank() == 0 || labels.size() != logits.rows()) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for logits " + shape_to_string(logits.shape()));
  }
  const std::size_t rows = logits.rows(), cols = logits.cols();
  const auto z = logits.values();
  std::vector<T> probs(z.size());
  std::vector<std::size_t> lab(labels.begin(), labels.end());
  T total{0};
  for (std::size_t r = 0; r < rows; ++r) {
    if (lab[r] >= cols) {
      throw DimensionError("softmax_cross_entropy: label " + std::to_string(lab[r]) +
                           " out of range for " + std::to_string(cols) + " classes");
    }
    const T* in = z.data() + r * cols;
    T peak = -std::numeric_limits<T>::infinity();
    for (std::size_t c = 0; c < cols; ++c) {
      if (std::isnan(in[c])) throw NumericError("softmax_cross_entropy: NaN logit");
      peak = std::max(peak, in[c]);
    }
    T denom{0};
    for (std::size_t c = 0; c < cols; ++c) denom += std::exp(in[c] - peak);
    const T log_norm = peak + std::log(denom);
    for (std::size_t c = 0; c < cols; ++c)
      probs[r * cols + c] = std::exp(in[c] - log_norm);
    total += log_norm - in[lab[r]];
  }
  return record<T>(Shape{}, {total}, {logits.node()},
                   [probs = std::move(probs), lab = std::move(lab), cols](
                       detail::Node<T>& self) {
                     auto& in = *self.inputs[0];
                     const T g = self.grad[0];
                     for (std::size_t r = 0; r < lab.size(); ++r) {
                       for (std::size_t c = 0; c < cols; ++c) {
                         const T onehot = c == lab[r] ? T{1} : T{0};
                         in.grad[r * cols + c] += g * (probs[r * cols + c] - onehot);
                       }
                     }
                   });
}

#define DISTILL_INSTANTIATE_OPS(T)                                              \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                \
  template Tensor<T> elementwise(ElementwiseOp, const Tensor<T>&,               \
                                 const Tensor<T>&);                             \
  template Tensor<T> activation(Activation, const Tensor<T>&);                  \
  template Tensor<T> softmax(const Tensor<T>&);                                 \
  template Tensor<T> concat(std::span<const Tensor<T>>);                        \
  template Tensor<T> sum(const Tensor<T>&);                                     \
  template Tensor<T> scale(const Tensor<T>&, T);                                \
  template Tensor<T> replicate_rows(const Tensor<T>&, std::size_t);             \
  template Tensor<T> slice_cols(const Tensor<T>&, std::size_t, std::size_t);    \
  template Tensor<T> gather_rows(const Tensor<T>&, std::span<const std::int32_t>); \
  template Tensor<T> select_rows(std::span<const char>, const Tensor<T>&,       \
                                 const Tensor<T>&);                             \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                          \
  template Tensor<T> squared_distance(const Tensor<T>&, std::span<const T>);    \
  template Tensor<T> softmax_cross_entropy(const Tensor<T>&,                    \
                                           std::span<const std::size_t>);

DISTILL_INSTANTIATE_OPS(float)
DISTILL_INSTANTIATE_OPS(double)

#undef DISTILL_INSTANTIATE_OPS

}  // namespace distill
