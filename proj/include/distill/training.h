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

#ifndef DISTILL_TRAINING_H_
#define DISTILL_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distill/augmentation.h"
#include "distill/data_io.h"
#include "distill/distillation.h"
#include "distill/model.h"

namespace distill {

// Per-parameter AdaDelta accumulators, zero-initialized.
template <typename T>
struct AdaDeltaState {
  double rho = 0.95;
  double epsilon = 1e-6;
  double learning_rate = 1.0;
  std::vector<std::vector<T>> mean_sq_grad;    // E[g^2]
  std::vector<std::vector<T>> mean_sq_update;  // E[dx^2]

  static AdaDeltaState for_parameters(std::span<const NamedParameter<T>> params,
                                      double rho = 0.95, double epsilon = 1e-6,
                                      double learning_rate = 1.0);
};

// For every scalar:
//   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
//   dx      <- -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
//   E[dx^2] <- rho E[dx^2] + (1 - rho) dx^2
//   x       <- x + lr dx
// then clears the gradients. A NaN gradient throws NumericError naming the
// parameter before anything is modified.
template <typename T>
void adadelta_step(std::span<NamedParameter<T>> params, AdaDeltaState<T>& state);

// A model-ready example. teacher_logits is empty unless a teacher scored it.
struct TrainingExample {
  TokenExample tokens;
  std::optional<std::size_t> gold;
  std::vector<double> teacher_logits;
  Provenance provenance = Provenance::kOriginal;
};

TrainingExample encode_example(const TaggedExample& example, const Vocabulary& vocab);
TrainingExample encode_record(const TransferRecord& record, const Vocabulary& vocab);

enum class TrainMode { kBaseline, kDistill };
TrainMode parse_train_mode(std::string_view name);

struct TrainConfig {
  TrainMode mode = TrainMode::kDistill;
  double alpha = 0.0;
  std::size_t batch_size = 50;
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
  bool shuffle = true;
  double rho = 0.95;
  double epsilon = 1e-6;
  double learning_rate = 1.0;

  void validate() const;
};

struct EvalReport {
  std::size_t count = 0;
  double accuracy = 0.0;
  double loss = 0.0;  // mean cross entropy against the gold labels
  // Positive-class (label 1) scores; present for two-label tasks only.
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;

  // Single-line JSON with fixed key order.
  std::string to_json() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_accuracy = 0.0;
  std::optional<double> dev_f1;
};

// "epoch,train_loss,dev_acc,dev_f1" header plus one row per epoch.
std::string history_csv(std::span<const EpochRecord> history);

template <typename T>
struct TrainResult {
  StudentModel<T> model;  // parameters of the best dev-accuracy epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_dev_accuracy = 0.0;
};

// Seeded shuffling each epoch, AdaDelta updates on the batch-mean loss, dev
// evaluation after every epoch, early stopping after `patience` epochs
// without a strict improvement in dev accuracy. Distill mode optimizes
// combined_loss against teacher logits; its cross-entropy target is the gold
// label for labeled originals and the teacher's argmax otherwise, so gold
// labels of synthetic examples are never read. Baseline mode uses gold
// labels only.
template <typename T>
TrainResult<T> train(const StudentModel<T>& initial, std::span<const TrainingExample> train_data,
                     std::span<const TrainingExample> dev_data, const TrainConfig& config);

template <typename T>
EvalReport evaluate(const StudentModel<T>& model, std::span<const TrainingExample> data,
                    std::size_t batch_size = 256);

// F1 on the positive class from raw counts; 0 when precision + recall is 0.
double f1_score(std::size_t true_pos, std::size_t false_pos, std::size_t false_neg);

// Logits for each example, computed without recording gradients.
template <typename T>
std::vector<std::vector<double>> predict_logits(const StudentModel<T>& model,
                                                std::span<const TokenExample> examples,
                                                std::size_t batch_size = 256);

// Maps examples to teacher signals.
using TeacherFn = std::function<std::vector<TeacherSignal>(std::span<const TokenExample>)>;

struct TeacherConfig {
  ModelConfig model{.embedding_dim = 64, .hidden = 64, .fc = 128};
  TrainConfig train{.mode = TrainMode::kBaseline, .max_epochs = 30, .patience = 5};
  std::uint64_t init_seed = 0;
};

// Desk-scale teacher: a wide student-architecture model trained on gold
// labels.
class ReferenceTeacher {
 public:
  explicit ReferenceTeacher(StudentModel<float> model) : model_(std::move(model)) {}

  const StudentModel<float>& model() const { return model_; }
  std::vector<TeacherSignal> label(std::span<const TokenExample> examples) const;
  TeacherFn as_function() const;

 private:
  StudentModel<float> model_;
};

ReferenceTeacher train_reference_teacher(const Vocabulary& vocab,
                                         std::span<const TrainingExample> train_data,
                                         std::span<const TrainingExample> dev_data,
                                         const TeacherConfig& config,
                                         std::vector<EpochRecord>* history = nullptr);

// Scores every example of an (augmented) corpus with the teacher, preserving
// order and provenance. Gold labels are kept for originals only.
std::vector<TransferRecord> label_corpus(std::span<const TaggedExample> corpus,
                                         const Vocabulary& vocab, const TeacherFn& teacher);

}  // namespace distill

#endif  // DISTILL_TRAINING_H_
