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

#include "distill/model.h"

#include <algorithm>
#include <utility>

#include "distill/errors.h"
#include "distill/ops.h"
#include "distill/rng.h"

namespace distill {

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> sentences) {
  Vocabulary vocab;
  for (const auto& sentence : sentences) {
    for (const std::string& token : sentence) {
      if (token != kMaskToken) vocab.add(token);
    }
  }
  return vocab;
}

std::int32_t Vocabulary::add(std::string_view token) {
  auto [it, inserted] =
      index_.try_emplace(std::string(token), static_cast<std::int32_t>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

std::int32_t Vocabulary::lookup(std::string_view token) const {
  if (token == kMaskToken) return kUnk;
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

std::vector<std::int32_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<std::int32_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& token : tokens) ids.push_back(lookup(token));
  return ids;
}

const std::string& Vocabulary::token(std::int32_t index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= tokens_.size()) {
    throw std::out_of_range("vocabulary index " + std::to_string(index) +
                            " out of range");
  }
  return tokens_[index];
}

void ModelConfig::validate() const {
  if (embedding_dim == 0 || hidden == 0 || fc == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (num_labels < 2) {
    throw ConfigError("a classifier needs at least 2 labels, got " +
                      std::to_string(num_labels));
  }
}

namespace {

template <typename T>
Tensor<T> xavier_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<T> values(rows * cols);
  for (T& v : values) v = static_cast<T>(rng.xavier(rows, cols));
  return Tensor<T>::matrix(rows, cols, std::move(values), true);
}

template <typename T>
LstmDirection<T> init_direction(Rng& rng, std::size_t input_dim, std::size_t hidden) {
  LstmDirection<T> dir;
  dir.input_weights = xavier_matrix<T>(rng, input_dim, 4 * hidden);
  dir.recurrent_weights = xavier_matrix<T>(rng, hidden, 4 * hidden);
  std::vector<T> bias(4 * hidden, T{0});
  std::fill_n(bias.begin() + hidden, hidden, T{1});
  dir.bias = Tensor<T>::vector(std::move(bias), true);
  return dir;
}

}  // namespace

template <typename T>
StudentModel<T>::StudentModel(ModelConfig config, Vocabulary vocab, std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)) {
  config_.validate();
  Rng rng(seed);
  const std::size_t v = vocab_.size(), d = config_.embedding_dim;
  std::vector<T> table(v * d);
  for (std::size_t i = d; i < table.size(); ++i) {
    table[i] = static_cast<T>(rng.uniform(-0.25, 0.25));
  }
  embeddings_.mode = config_.embedding_mode;
  embeddings_.table = Tensor<T>::matrix(
      v, d, std::move(table), config_.embedding_mode == EmbeddingMode::kNonStatic);

  encoder_.hidden = config_.hidden;
  encoder_.forward = init_direction<T>(rng, d, config_.hidden);
  encoder_.backward = init_direction<T>(rng, d, config_.hidden);

  const std::size_t in = config_.classifier_input_dim();
  head_.hidden_weights = xavier_matrix<T>(rng, in, config_.fc);
  head_.hidden_bias = Tensor<T>::zeros({config_.fc}, true);
  head_.output_weights = xavier_matrix<T>(rng, config_.fc, config_.num_labels);
  head_.output_bias = Tensor<T>::zeros({config_.num_labels}, true);
}

template <typename T>
void StudentModel<T>::set_embedding_table(Tensor<T> table) {
  if (table.rank() != 2 || table.rows() != vocab_.size() ||
      table.cols() != config_.embedding_dim) {
    throw DimensionError("embedding table " + shape_to_string(table.shape()) +
                         " does not match vocabulary " +
                         std::to_string(vocab_.size()) + " x " +
                         std::to_string(config_.embedding_dim));
  }
  Tensor<T> copy(table.shape(),
                 std::vector<T>(table.values().begin(), table.values().end()),
                 embeddings_.mode == EmbeddingMode::kNonStatic);
  std::fill_n(copy.mutable_values().begin(), config_.embedding_dim, T{0});
  embeddings_.table = std::move(copy);
}

template <typename T>
void StudentModel<T>::check_tokens(std::span<const std::int32_t> tokens) const {
  if (tokens.empty()) {
    throw DimensionError("cannot encode an empty sentence");
  }
  for (std::int32_t id : tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
      throw DimensionError("token index " + std::to_string(id) +
                           " outside vocabulary of size " +
                           std::to_string(vocab_.size()));
    }
  }
}

template <typename T>
Tensor<T> StudentModel<T>::run_direction(
    const LstmDirection<T>& dir,
    std::span<const std::span<const std::int32_t>> sentences, bool reverse) const {
  const std::size_t batch = sentences.size();
  const std::size_t h = config_.hidden;
  std::size_t steps = 0;
  for (const auto& s : sentences) steps = std::max(steps, s.size());

  Tensor<T> hidden = Tensor<T>::zeros({batch, h});
  Tensor<T> cell = Tensor<T>::zeros({batch, h});
  const Tensor<T> bias = replicate_rows(dir.bias, batch);
  std::vector<std::int32_t> ids(batch);
  std::vector<char> active(batch);
  for (std::size_t t = 0; t < steps; ++t) {
    bool all_active = true;
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t len = sentences[b].size();
      active[b] = t < len;
      all_active = all_active && active[b];
      ids[b] = t < len ? sentences[b][reverse ? len - 1 - t : t] : Vocabulary::kPad;
    }
    const Tensor<T> x = gather_rows(embeddings_.table, ids);
    const Tensor<T> gates =
        add(add(matmul(x, dir.input_weights), matmul(hidden, dir.recurrent_weights)),
            bias);
    const Tensor<T> squashed = sigmoid(gates);
    const Tensor<T> in_gate = slice_cols(squashed, 0, h);
    const Tensor<T> forget_gate = slice_cols(squashed, h, h);
    const Tensor<T> out_gate = slice_cols(squashed, 3 * h, h);
    const Tensor<T> candidate = tanh(slice_cols(gates, 2 * h, h));
    Tensor<T> next_cell = add(mul(forget_gate, cell), mul(in_gate, candidate));
    Tensor<T> next_hidden = mul(out_gate, tanh(next_cell));
    if (all_active) {
      cell = std::move(next_cell);
      hidden = std::move(next_hidden);
    } else {
      // Finished sentences keep their state.
      cell = select_rows<T>(active, next_cell, cell);
      hidden = select_rows<T>(active, next_hidden, hidden);
    }
  }
  return hidden;
}

template <typename T>
Tensor<T> StudentModel<T>::encode_batch(
    std::span<const std::span<const std::int32_t>> sentences) const {
  if (sentences.empty()) throw DimensionError("cannot encode an empty batch");
  for (const auto& s : sentences) check_tokens(s);
  const Tensor<T> fwd = run_direction(encoder_.forward, sentences, false);
  const Tensor<T> bwd = run_direction(encoder_.backward, sentences, true);
  return concat({fwd, bwd});
}

template <typename T>
Tensor<T> StudentModel<T>::encode_sentence(std::span<const std::int32_t> tokens,
                                           std::size_t length) const {
  if (length == 0) throw DimensionError("sentence length must be at least 1");
  if (length > tokens.size()) {
    throw DimensionError("length " + std::to_string(length) + " exceeds " +
                         std::to_string(tokens.size()) + " tokens");
  }
  for (std::size_t i = length; i < tokens.size(); ++i) {
    if (tokens[i] != Vocabulary::kPad) {
      throw DimensionError("non-padding token at position " + std::to_string(i) +
                           " past length " + std::to_string(length));
    }
  }
  const std::span<const std::int32_t> real = tokens.first(length);
  const Tensor<T> encoded = encode_batch({&real, 1});
  return reshape(encoded, Shape{encoded.size()});
}

template <typename T>
Tensor<T> StudentModel<T>::classify(const Tensor<T>& features) const {
  const bool vector_input = features.rank() == 1;
  const Tensor<T> rows =
      vector_input ? reshape(features, Shape{1, features.size()}) : features;
  if (rows.cols() != config_.classifier_input_dim()) {
    throw DimensionError("classifier expects " +
                         std::to_string(config_.classifier_input_dim()) +
                         " features, got " + shape_to_string(features.shape()));
  }
  const std::size_t batch = rows.rows();
  const Tensor<T> hidden =
      relu(add(matmul(rows, head_.hidden_weights), replicate_rows(head_.hidden_bias, batch)));
  Tensor<T> logits =
      add(matmul(hidden, head_.output_weights), replicate_rows(head_.output_bias, batch));
  return vector_input ? reshape(logits, Shape{config_.num_labels}) : logits;
}

template <typename T>
Tensor<T> StudentModel<T>::forward_batch(std::span<const TokenExample* const> batch) const {
  if (batch.empty()) throw DimensionError("forward_batch: empty batch");
  const bool pair = config_.arity == Arity::kPair;
  std::vector<std::span<const std::int32_t>> first, second;
  for (const TokenExample* ex : batch) {
    if (ex->second.has_value() != pair) {
      throw DimensionError(pair ? "pair model given a single-sentence example"
                                : "single-sentence model given a sentence pair");
    }
    first.emplace_back(ex->first);
    if (pair) second.emplace_back(*ex->second);
  }
  Tensor<T> features = encode_batch(first);
  if (pair) features = concat_compare(features, encode_batch(second));
  return classify(features);
}

template <typename T>
Tensor<T> StudentModel<T>::forward_logits(const TokenExample& example) const {
  const TokenExample* one = &example;
  const Tensor<T> logits = forward_batch({&one, 1});
  return reshape(logits, Shape{config_.num_labels});
}

template <typename T>
std::vector<NamedParameter<T>> StudentModel<T>::all_parameters() const {
  std::vector<NamedParameter<T>> params;
  params.push_back({"embedding", embeddings_.table});
  for (const auto& [name, dir] :
       {std::pair{"forward", &encoder_.forward}, std::pair{"backward", &encoder_.backward}}) {
    const std::string prefix = std::string("encoder.") + name + ".";
    params.push_back({prefix + "input_weights", dir->input_weights});
    params.push_back({prefix + "recurrent_weights", dir->recurrent_weights});
    params.push_back({prefix + "bias", dir->bias});
  }
  params.push_back({"head.hidden_weights", head_.hidden_weights});
  params.push_back({"head.hidden_bias", head_.hidden_bias});
  params.push_back({"head.output_weights", head_.output_weights});
  params.push_back({"head.output_bias", head_.output_bias});
  return params;
}

template <typename T>
std::vector<NamedParameter<T>> StudentModel<T>::trainable_parameters() const {
  std::vector<NamedParameter<T>> params = all_parameters();
  if (embeddings_.mode == EmbeddingMode::kStatic) params.erase(params.begin());
  return params;
}

template <typename T>
std::size_t StudentModel<T>::count_parameters(bool include_embeddings) const {
  std::size_t total = 0;
  for (const auto& p : all_parameters()) {
    if (p.name == "embedding" && !include_embeddings) continue;
    total += p.tensor.size();
  }
  return total;
}

template <typename T>
StudentModel<T> StudentModel<T>::clone() const {
  StudentModel copy;
  copy.config_ = config_;
  copy.vocab_ = vocab_;
  copy.embeddings_ = {embeddings_.table.clone(), embeddings_.mode};
  copy.encoder_.hidden = encoder_.hidden;
  for (auto [dst, src] : {std::pair{&copy.encoder_.forward, &encoder_.forward},
                          std::pair{&copy.encoder_.backward, &encoder_.backward}}) {
    dst->input_weights = src->input_weights.clone();
    dst->recurrent_weights = src->recurrent_weights.clone();
    dst->bias = src->bias.clone();
  }
  copy.head_ = {head_.hidden_weights.clone(), head_.hidden_bias.clone(),
                head_.output_weights.clone(), head_.output_bias.clone()};
  return copy;
}

template <typename T>
void StudentModel<T>::assign_parameters(const StudentModel& other) {
  if (!(other.config_ == config_) || other.vocab_.size() != vocab_.size()) {
    throw DimensionError("assign_parameters: model configurations differ");
  }
  auto dst = all_parameters();
  const auto src = other.all_parameters();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    std::copy(src[i].tensor.values().begin(), src[i].tensor.values().end(),
              dst[i].tensor.mutable_values().begin());
  }
}

template <typename T>
Tensor<T> concat_compare(const Tensor<T>& h1, const Tensor<T>& h2) {
  if (h1.shape() != h2.shape()) {
    throw DimensionError("concat_compare: shape mismatch " + shape_to_string(h1.shape()) +
                         " vs " + shape_to_string(h2.shape()));
  }
  return concat({h1, h2, mul(h1, h2), abs_diff(h1, h2)});
}

template class StudentModel<float>;
template class StudentModel<double>;
template Tensor<float> concat_compare(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> concat_compare(const Tensor<double>&, const Tensor<double>&);

}  // namespace distill
