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

#ifndef DISTILL_MODEL_H_
#define DISTILL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "distill/tensor.h"

namespace distill {

inline constexpr std::string_view kMaskToken = "[MASK]";

// Token <-> index map with two reserved entries. The unknown token doubles as
// the augmentation mask token.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens in order of first appearance. The mask token is never added.
  static Vocabulary build(std::span<const std::vector<std::string>> sentences);

  // Returns the index of `token`, inserting it if new.
  std::int32_t add(std::string_view token);
  // kUnk for unseen tokens and for the mask token.
  std::int32_t lookup(std::string_view token) const;
  std::vector<std::int32_t> encode(std::span<const std::string> tokens) const;
  const std::string& token(std::int32_t index) const;
  std::size_t size() const { return tokens_.size(); }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

enum class Arity { kSingle, kPair };
enum class EmbeddingMode { kStatic, kNonStatic };

struct ModelConfig {
  std::size_t embedding_dim = 300;
  std::size_t hidden = 150;
  std::size_t fc = 200;
  std::size_t num_labels = 2;
  Arity arity = Arity::kSingle;
  EmbeddingMode embedding_mode = EmbeddingMode::kNonStatic;

  // 2h for single sentences, 4 * 2h after concatenate-compare for pairs.
  std::size_t classifier_input_dim() const {
    return (arity == Arity::kPair ? 4 : 1) * 2 * hidden;
  }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

template <typename T>
struct EmbeddingTable {
  Tensor<T> table;  // [|V| x d]; row 0 is all zero
  EmbeddingMode mode = EmbeddingMode::kNonStatic;
};

// Gates are packed along the columns in the order input, forget, cell, output.
template <typename T>
struct LstmDirection {
  Tensor<T> input_weights;      // [d x 4h]
  Tensor<T> recurrent_weights;  // [h x 4h]
  Tensor<T> bias;               // [4h]
};

template <typename T>
struct BiLstmParams {
  LstmDirection<T> forward;
  LstmDirection<T> backward;
  std::size_t hidden = 0;
};

template <typename T>
struct ClassifierHead {
  Tensor<T> hidden_weights;  // [in x fc]
  Tensor<T> hidden_bias;     // [fc]
  Tensor<T> output_weights;  // [fc x k]
  Tensor<T> output_bias;     // [k]
};

template <typename T>
struct NamedParameter {
  std::string name;
  Tensor<T> tensor;
};

// One example as token indices; `second` is set for sentence pairs.
struct TokenExample {
  std::vector<std::int32_t> first;
  std::optional<std::vector<std::int32_t>> second;
};

// Single-layer BiLSTM classifier. For pair arity the same encoder weights
// embed both sentences, followed by concatenate-compare.
template <typename T>
class StudentModel {
 public:
  // Random initialization: embeddings uniform(-0.25, 0.25) with a zero
  // padding row, Xavier-uniform weight matrices, zero biases except a forget
  // gate bias of 1.
  StudentModel(ModelConfig config, Vocabulary vocab, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  EmbeddingTable<T>& embeddings() { return embeddings_; }
  const EmbeddingTable<T>& embeddings() const { return embeddings_; }
  BiLstmParams<T>& encoder() { return encoder_; }
  const BiLstmParams<T>& encoder() const { return encoder_; }
  ClassifierHead<T>& head() { return head_; }
  const ClassifierHead<T>& head() const { return head_; }

  // Replaces the embedding matrix, which must be [|V| x d]. Row 0 is zeroed.
  void set_embedding_table(Tensor<T> table);

  // Encodes tokens[0, length): the forward LSTM runs over positions
  // 0..length-1, the backward one over length-1..0, and the two final hidden
  // states are concatenated. Positions at or past `length` must be padding.
  Tensor<T> encode_sentence(std::span<const std::int32_t> tokens,
                            std::size_t length) const;

  // Batched encoding of unpadded sentences -> [B x 2h]. Each row equals
  // encode_sentence of that sentence alone.
  Tensor<T> encode_batch(std::span<const std::span<const std::int32_t>> sentences) const;

  // Pre-softmax logits [k] for one example.
  Tensor<T> forward_logits(const TokenExample& example) const;
  // [B x k] for a batch; all examples must match the model's arity.
  Tensor<T> forward_batch(std::span<const TokenExample* const> batch) const;

  // The classifier (hidden ReLU layer + output layer) applied to features.
  Tensor<T> classify(const Tensor<T>& features) const;

  std::size_t count_parameters(bool include_embeddings) const;

  // Parameters updated by training. Embeddings are included only in
  // non-static mode.
  std::vector<NamedParameter<T>> trainable_parameters() const;
  // Every parameter tensor in checkpoint order.
  std::vector<NamedParameter<T>> all_parameters() const;

  // Deep copy with independent storage.
  StudentModel clone() const;
  // Copies parameter values from a model of identical configuration.
  void assign_parameters(const StudentModel& other);

 private:
  StudentModel() = default;
  Tensor<T> run_direction(const LstmDirection<T>& dir,
                          std::span<const std::span<const std::int32_t>> sentences,
                          bool reverse) const;
  void check_tokens(std::span<const std::int32_t> tokens) const;

  ModelConfig config_;
  Vocabulary vocab_;
  EmbeddingTable<T> embeddings_;
  BiLstmParams<T> encoder_;
  ClassifierHead<T> head_;
};

// The concatenate-compare feature map [h1, h2, h1 * h2, |h1 - h2|]. Works on
// vectors or on matrices row by row.
template <typename T>
Tensor<T> concat_compare(const Tensor<T>& h1, const Tensor<T>& h2);

extern template class StudentModel<float>;
extern template class StudentModel<double>;

}  // namespace distill

#endif  // DISTILL_MODEL_H_
