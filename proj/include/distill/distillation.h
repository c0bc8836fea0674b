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

#ifndef DISTILL_DISTILLATION_H_
#define DISTILL_DISTILLATION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "distill/tensor.h"

namespace distill {

// Index of the largest entry; ties go to the lowest index. Throws
// NumericError on NaN and DimensionError on an empty input.
std::size_t argmax(std::span<const double> values);

// Teacher logits and the label they imply.
class TeacherSignal {
 public:
  explicit TeacherSignal(std::vector<double> logits);

  const std::vector<double>& logits() const { return logits_; }
  std::size_t label() const { return label_; }

 private:
  std::vector<double> logits_;
  std::size_t label_;
};

// One-hot target vector.
class TargetDistribution {
 public:
  TargetDistribution(std::size_t label, std::size_t num_labels);

  std::size_t label() const { return label_; }
  std::size_t size() const { return num_labels_; }
  std::vector<double> values() const;

 private:
  std::size_t label_;
  std::size_t num_labels_;
};

struct DistillConfig {
  // Weight of the cross-entropy term; 0 trains on the logit regression alone.
  double alpha = 0.0;
  void validate() const;
};

// One-hot at the argmax of a probability or logit vector.
TargetDistribution pseudo_label(std::span<const double> scores);

// ||z_B - z_S||^2, summed over labels (and over rows for a batch [B x k]).
template <typename T>
Tensor<T> distill_loss(const Tensor<T>& student_logits,
                       std::span<const double> teacher_logits);

// -log softmax(z_S)[t].
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& student_logits, const TargetDistribution& target);

// Row-wise cross entropy of [B x k] logits against label indices, summed.
template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& student_logits,
                        std::span<const std::size_t> labels);

// alpha * CE + (1 - alpha) * distill. The endpoints return exactly one term.
template <typename T>
Tensor<T> combined_loss(const Tensor<T>& student_logits, const TargetDistribution& target,
                        std::span<const double> teacher_logits, const DistillConfig& config);

// Batched form: summed over rows.
template <typename T>
Tensor<T> combined_loss(const Tensor<T>& student_logits,
                        std::span<const std::size_t> labels,
                        std::span<const double> teacher_logits, const DistillConfig& config);

}  // namespace distill

#endif  // DISTILL_DISTILLATION_H_
