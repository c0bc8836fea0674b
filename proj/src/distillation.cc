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

#include "distill/distillation.h"

#include <cmath>
#include <string>

#include "distill/errors.h"
#include "distill/ops.h"

namespace distill {

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) throw NumericError("argmax: NaN entry");
    if (values[i] > values[best]) best = i;
  }
  return best;
}

TeacherSignal::TeacherSignal(std::vector<double> logits)
    : logits_(std::move(logits)), label_(argmax(logits_)) {}

TargetDistribution::TargetDistribution(std::size_t label, std::size_t num_labels)
    : label_(label), num_labels_(num_labels) {
  if (label >= num_labels) {
    throw DimensionError("target label " + std::to_string(label) + " out of range for " +
                         std::to_string(num_labels) + " labels");
  }
}

std::vector<double> TargetDistribution::values() const {
  std::vector<double> v(num_labels_, 0.0);
  v[label_] = 1.0;
  return v;
}

void DistillConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

TargetDistribution pseudo_label(std::span<const double> scores) {
  return TargetDistribution(argmax(scores), scores.size());
}

template <typename T>
Tensor<T> distill_loss(const Tensor<T>& student_logits,
                       std::span<const double> teacher_logits) {
  if (teacher_logits.size() != student_logits.size()) {
    throw DimensionError("distill_loss: student logits " +
                         shape_to_string(student_logits.shape()) + " vs " +
                         std::to_string(teacher_logits.size()) + " teacher logits");
  }
  std::vector<T> target(teacher_logits.begin(), teacher_logits.end());
  return squared_distance(student_logits, std::span<const T>(target));
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& student_logits, const TargetDistribution& target) {
  if (student_logits.rank() != 1 || student_logits.size() != target.size()) {
    throw DimensionError("cross_entropy: logits " + shape_to_string(student_logits.shape()) +
                         " vs target of length " + std::to_string(target.size()));
  }
  const std::size_t label = target.label();
  return softmax_cross_entropy(student_logits, std::span<const std::size_t>(&label, 1));
}

template <typename T>
Tensor<T> cross_entropy(const Tensor<T>& student_logits,
                        std::span<const std::size_t> labels) {
  return softmax_cross_entropy(student_logits, labels);
}

namespace {

template <typename T>
Tensor<T> blend(const Tensor<T>& ce, const Tensor<T>& mse,
                double alpha) {
  if (alpha == 1.0) return ce;
  if (alpha == 0.0) return mse;
  return add(scale(ce, static_cast<T>(alpha)),
             scale(mse, static_cast<T>(1.0 - alpha)));
}

}  // namespace

template <typename T>
Tensor<T> combined_loss(const Tensor<T>& student_logits, const TargetDistribution& target,
                        std::span<const double> teacher_logits, const DistillConfig& config) {
  config.validate();
  const Tensor<T> ce =
      config.alpha > 0.0 ? cross_entropy(student_logits, target) : Tensor<T>();
  const Tensor<T> mse =
      config.alpha < 1.0 ? distill_loss(student_logits, teacher_logits) : Tensor<T>();
  return blend(ce, mse, config.alpha);
}

template <typename T>
Tensor<T> combined_loss(const Tensor<T>& student_logits,
                        std::span<const std::size_t> labels,
                        std::span<const double> teacher_logits, const DistillConfig& config) {
  config.validate();
  const Tensor<T> ce =
      config.alpha > 0.0 ? cross_entropy(student_logits, labels) : Tensor<T>();
  const Tensor<T> mse =
      config.alpha < 1.0 ? distill_loss(student_logits, teacher_logits) : Tensor<T>();
  return blend(ce, mse, config.alpha);
}

#define DISTILL_INSTANTIATE_LOSSES(T)                                                \
  template Tensor<T> distill_loss(const Tensor<T>&, std::span<const double>);       \
  template Tensor<T> cross_entropy(const Tensor<T>&, const TargetDistribution&);    \
  template Tensor<T> cross_entropy(const Tensor<T>&, std::span<const std::size_t>); \
  template Tensor<T> combined_loss(const Tensor<T>&, const TargetDistribution&,     \
                                   std::span<const double>, const DistillConfig&);  \
  template Tensor<T> combined_loss(const Tensor<T>&, std::span<const std::size_t>,  \
                                   std::span<const double>, const DistillConfig&);

DISTILL_INSTANTIATE_LOSSES(float)
DISTILL_INSTANTIATE_LOSSES(double)

#undef DISTILL_INSTANTIATE_LOSSES

}  // namespace distill
