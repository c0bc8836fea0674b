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

#include "distill/training.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "distill/errors.h"
#include "distill/ops.h"
#include "distill/rng.h"

namespace distill {

template <typename T>
AdaDeltaState<T> AdaDeltaState<T>::for_parameters(std::span<const NamedParameter<T>> params,
                                                  double rho, double epsilon,
                                                  double learning_rate) {
  AdaDeltaState state;
  state.rho = rho;
  state.epsilon = epsilon;
  state.learning_rate = learning_rate;
  for (const auto& p : params) {
    state.mean_sq_grad.emplace_back(p.tensor.size(), T{0});
    state.mean_sq_update.emplace_back(p.tensor.size(), T{0});
  }
  return state;
}

template <typename T>
void adadelta_step(std::span<NamedParameter<T>> params, AdaDeltaState<T>& state) {
  if (state.mean_sq_grad.size() != params.size()) {
    throw DimensionError("adadelta_step: state tracks " +
                         std::to_string(state.mean_sq_grad.size()) + " parameters, got " +
                         std::to_string(params.size()));
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto grad = params[p].tensor.grad();
    if (grad.size() != state.mean_sq_grad[p].size()) {
      throw DimensionError("adadelta_step: parameter '" + params[p].name +
                           "' has no gradient buffer of the expected size");
    }
    for (T g : grad) {
      if (std::isnan(g)) {
        throw NumericError("adadelta_step: NaN gradient in '" + params[p].name + "'");
      }
    }
  }
  const T rho = static_cast<T>(state.rho);
  const T eps = static_cast<T>(state.epsilon);
  const T lr = static_cast<T>(state.learning_rate);
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor<T>& tensor = params[p].tensor;
    auto values = tensor.mutable_values();
    auto grad = tensor.mutable_grad();
    auto& eg2 = state.mean_sq_grad[p];
    auto& edx2 = state.mean_sq_update[p];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const T g = grad[i];
      eg2[i] = rho * eg2[i] + (T{1} - rho) * g * g;
      const T dx = -(std::sqrt(edx2[i] + eps) / std::sqrt(eg2[i] + eps)) * g;
      edx2[i] = rho * edx2[i] + (T{1} - rho) * dx * dx;
      values[i] += lr * dx;
    }
    tensor.zero_grad();
  }
}

TrainingExample encode_example(const TaggedExample& example, const Vocabulary& vocab) {
  TrainingExample out;
  out.tokens.first = vocab.encode(example.first.tokens);
  if (example.second) out.tokens.second = vocab.encode(example.second->tokens);
  out.gold = example.gold_label;
  out.provenance = example.provenance;
  return out;
}

TrainingExample encode_record(const TransferRecord& record, const Vocabulary& vocab) {
  TrainingExample out;
  out.tokens.first = vocab.encode(tokenize(record.text_a));
  if (record.text_b) out.tokens.second = vocab.encode(tokenize(*record.text_b));
  out.gold = record.gold;
  out.teacher_logits = record.logits;
  out.provenance = record.provenance;
  return out;
}

TrainMode parse_train_mode(std::string_view name) {
  if (name == "baseline") return TrainMode::kBaseline;
  if (name == "distill") return TrainMode::kDistill;
  throw ConfigError("unknown training mode '" + std::string(name) +
                    "' (expected baseline or distill)");
}

void TrainConfig::validate() const {
  DistillConfig{alpha}.validate();
  if (batch_size == 0) throw ConfigError("batch size must be at least 1");
  if (patience == 0) throw ConfigError("patience must be at least 1");
  if (max_epochs == 0) throw ConfigError("max epochs must be at least 1");
  if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must be in (0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

namespace {

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  std::string out = "{\"count\":" + std::to_string(count) +
                    ",\"accuracy\":" + format_metric(accuracy) +
                    ",\"loss\":" + format_metric(loss);
  if (f1) {
    out += ",\"precision\":" + format_metric(*precision) +
           ",\"recall\":" + format_metric(*recall) + ",\"f1\":" + format_metric(*f1);
  }
  return out + "}";
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::string out = "epoch,train_loss,dev_acc,dev_f1\n";
  for (const EpochRecord& r : history) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,", r.epoch, r.train_loss, r.dev_accuracy);
    out += buf;
    if (r.dev_f1) {
      std::snprintf(buf, sizeof(buf), "%.17g", *r.dev_f1);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

double f1_score(std::size_t true_pos, std::size_t false_pos, std::size_t false_neg) {
  const double p = true_pos + false_pos == 0
                       ? 0.0
                       : static_cast<double>(true_pos) / static_cast<double>(true_pos + false_pos);
  const double r = true_pos + false_neg == 0
                       ? 0.0
                       : static_cast<double>(true_pos) / static_cast<double>(true_pos + false_neg);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

template <typename T>
std::vector<std::vector<double>> predict_logits(const StudentModel<T>& model,
                                                std::span<const TokenExample> examples,
                                                std::size_t batch_size) {
  NoGradGuard no_grad;
  std::vector<std::vector<double>> out;
  out.reserve(examples.size());
  const std::size_t k = model.config().num_labels;
  std::vector<const TokenExample*> batch;
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    const std::size_t end = std::min(examples.size(), start + batch_size);
    batch.clear();
    for (std::size_t i = start; i < end; ++i) batch.push_back(&examples[i]);
    const Tensor<T> logits = model.forward_batch(batch);
    for (std::size_t r = 0; r < batch.size(); ++r) {
      const auto row = logits.values().subspan(r * k, k);
      out.emplace_back(row.begin(), row.end());
    }
  }
  return out;
}

template <typename T>
EvalReport evaluate(const StudentModel<T>& model, std::span<const TrainingExample> data,
                    std::size_t batch_size) {
  if (data.empty()) throw std::invalid_argument("cannot evaluate on an empty dataset");
  std::vector<TokenExample> inputs;
  inputs.reserve(data.size());
  for (const TrainingExample& ex : data) {
    if (!ex.gold) throw std::invalid_argument("evaluation data must carry gold labels");
    inputs.push_back(ex.tokens);
  }
  const auto logits = predict_logits(model, inputs, batch_size);
  std::size_t correct = 0, tp = 0, fp = 0, fn = 0;
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t gold = *data[i].gold;
    const std::size_t pred = argmax(logits[i]);
    correct += pred == gold;
    tp += pred == 1 && gold == 1;
    fp += pred == 1 && gold != 1;
    fn += pred != 1 && gold == 1;
    double peak = logits[i][0];
    for (double z : logits[i]) peak = std::max(peak, z);
    double denom = 0.0;
    for (double z : logits[i]) denom += std::exp(z - peak);
    loss += peak + std::log(denom) - logits[i].at(gold);
  }
  EvalReport report;
  report.count = data.size();
  report.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  report.loss = loss / static_cast<double>(data.size());
  if (model.config().num_labels == 2) {
    report.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    report.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    report.f1 = f1_score(tp, fp, fn);
  }
  return report;
}

template <typename T>
TrainResult<T> train(const StudentModel<T>& initial, std::span<const TrainingExample> train_data,
                     std::span<const TrainingExample> dev_data, const TrainConfig& config) {
  config.validate();
  if (train_data.empty()) throw std::invalid_argument("training data is empty");
  if (dev_data.empty()) throw std::invalid_argument("dev data is empty");
  const std::size_t k = initial.config().num_labels;
  const bool distill = config.mode == TrainMode::kDistill;
  for (std::size_t i = 0; i < train_data.size(); ++i) {
    const TrainingExample& ex = train_data[i];
    if (distill && ex.teacher_logits.size() != k) {
      throw std::invalid_argument("distill mode needs " + std::to_string(k) +
                                  " teacher logits on every training example (example " +
                                  std::to_string(i) + ")");
    }
    if (!distill && !ex.gold) {
      throw std::invalid_argument("baseline mode needs a gold label on every training "
                                  "example (example " + std::to_string(i) + ")");
    }
  }

  StudentModel<T> model = initial.clone();
  auto params = model.trainable_parameters();
  auto state = AdaDeltaState<T>::for_parameters(params, config.rho, config.epsilon,
                                                config.learning_rate);
  const DistillConfig distill_config{config.alpha};

  TrainResult<T> result{model.clone(), {}, 0, -1.0};
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t epochs_without_improvement = 0;

  std::vector<const TokenExample*> batch;
  std::vector<std::size_t> labels;
  std::vector<double> teacher;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    if (config.shuffle) {
      Rng rng(derive_seed(config.seed, epoch));
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.uniform_int(i)]);
      }
    }
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      labels.clear();
      teacher.clear();
      for (std::size_t i = start; i < end; ++i) {
        const TrainingExample& ex = train_data[order[i]];
        batch.push_back(&ex.tokens);
        if (distill) {
          const bool labeled_original = ex.provenance == Provenance::kOriginal && ex.gold;
          labels.push_back(labeled_original ? *ex.gold : argmax(ex.teacher_logits));
          teacher.insert(teacher.end(), ex.teacher_logits.begin(), ex.teacher_logits.end());
        } else {
          labels.push_back(*ex.gold);
        }
      }
      const Tensor<T> logits = model.forward_batch(batch);
      const Tensor<T> total = distill
                                  ? combined_loss(logits, labels, teacher, distill_config)
                                  : cross_entropy(logits, std::span<const std::size_t>(labels));
      Tensor<T> loss = scale(total, static_cast<T>(1.0 / static_cast<double>(batch.size())));
      loss.backward();
      adadelta_step<T>(params, state);
      epoch_loss += static_cast<double>(total.item());
    }

    const EvalReport dev = evaluate(model, dev_data);
    result.history.push_back(
        {epoch, epoch_loss / static_cast<double>(train_data.size()), dev.accuracy, dev.f1});
    if (dev.accuracy > result.best_dev_accuracy) {
      result.best_dev_accuracy = dev.accuracy;
      result.best_epoch = epoch;
      result.model.assign_parameters(model);
      epochs_without_improvement = 0;
    } else if (++epochs_without_improvement >= config.patience) {
      break;
    }
  }
  return result;
}

std::vector<TeacherSignal> ReferenceTeacher::label(std::span<const TokenExample> examples) const {
  std::vector<TeacherSignal> out;
  for (auto& logits : predict_logits(model_, examples)) out.emplace_back(std::move(logits));
  return out;
}

TeacherFn ReferenceTeacher::as_function() const {
  return [this](std::span<const TokenExample> examples) { return label(examples); };
}

ReferenceTeacher train_reference_teacher(const Vocabulary& vocab,
                                         std::span<const TrainingExample> train_data,
                                         std::span<const TrainingExample> dev_data,
                                         const TeacherConfig& config,
                                         std::vector<EpochRecord>* history) {
  TrainConfig train_config = config.train;
  train_config.mode = TrainMode::kBaseline;
  StudentModel<float> initial(config.model, vocab, config.init_seed);
  TrainResult<float> result = train(initial, train_data, dev_data, train_config);
  if (history != nullptr) *history = result.history;
  return ReferenceTeacher(std::move(result.model));
}

std::vector<TransferRecord> label_corpus(std::span<const TaggedExample> corpus,
                                         const Vocabulary& vocab, const TeacherFn& teacher) {
  std::vector<TokenExample> inputs;
  inputs.reserve(corpus.size());
  for (const TaggedExample& ex : corpus) inputs.push_back(encode_example(ex, vocab).tokens);
  const std::vector<TeacherSignal> signals = teacher(inputs);
  if (signals.size() != corpus.size()) {
    throw std::logic_error("teacher returned " + std::to_string(signals.size()) +
                           " signals for " + std::to_string(corpus.size()) + " examples");
  }
  std::vector<TransferRecord> records;
  records.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const TaggedExample& ex = corpus[i];
    TransferRecord r;
    r.text_a = join_tokens(ex.first.tokens);
    if (ex.second) r.text_b = join_tokens(ex.second->tokens);
    r.logits = signals[i].logits();
    r.label = signals[i].label();
    r.provenance = ex.provenance;
    if (ex.provenance == Provenance::kOriginal) r.gold = ex.gold_label;
    records.push_back(std::move(r));
  }
  return records;
}

#define DISTILL_INSTANTIATE_TRAINING(T)                                                   \
  template struct AdaDeltaState<T>;                                                       \
  template void adadelta_step(std::span<NamedParameter<T>>, AdaDeltaState<T>&);           \
  template TrainResult<T> train(const StudentModel<T>&, std::span<const TrainingExample>, \
                                std::span<const TrainingExample>, const TrainConfig&);    \
  template EvalReport evaluate(const StudentModel<T>&, std::span<const TrainingExample>,  \
                               std::size_t);                                              \
  template std::vector<std::vector<double>> predict_logits(                               \
      const StudentModel<T>&, std::span<const TokenExample>, std::size_t);

DISTILL_INSTANTIATE_TRAINING(float)
DISTILL_INSTANTIATE_TRAINING(double)

#undef DISTILL_INSTANTIATE_TRAINING

}  // namespace distill
