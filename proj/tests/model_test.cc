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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "distill/checkpoint.h"
#include "distill/distillation.h"
#include "distill/errors.h"
#include "distill/model.h"
#include "distill/ops.h"
#include "gradcheck.h"
#include "param_count.h"
#include "test_util.h"

namespace distill {
namespace {

Vocabulary small_vocab() {
  const std::vector<std::vector<std::string>> s = {{"a", "b", "c", "d", "e", "f"}};
  return Vocabulary::build(s);
}

// Plain-loop LSTM over raw parameter arrays, one direction.
std::vector<double> reference_lstm(const StudentModel<double>& m, const LstmDirection<double>& dir,
                                   std::vector<std::int32_t> ids) {
  const std::size_t d = m.config().embedding_dim, h = m.config().hidden;
  const auto emb = m.embeddings().table.values();
  const auto wx = dir.input_weights.values();
  const auto wh = dir.recurrent_weights.values();
  const auto b = dir.bias.values();
  std::vector<double> hid(h, 0.0), cell(h, 0.0);
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (std::int32_t id : ids) {
    std::vector<double> g(4 * h);
    for (std::size_t j = 0; j < 4 * h; ++j) {
      double acc = b[j];
      for (std::size_t k = 0; k < d; ++k) acc += emb[id * d + k] * wx[k * 4 * h + j];
      for (std::size_t k = 0; k < h; ++k) acc += hid[k] * wh[k * 4 * h + j];
      g[j] = acc;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sig(g[j]), f = sig(g[h + j]), c = std::tanh(g[2 * h + j]),
                   o = sig(g[3 * h + j]);
      cell[j] = f * cell[j] + i * c;
      hid[j] = o * std::tanh(cell[j]);
    }
  }
  return hid;
}

TEST(VocabularyTest, ReservedIndicesAndMask) {
  Vocabulary v = small_vocab();
  EXPECT_EQ(v.lookup("<pad>"), Vocabulary::kPad);
  EXPECT_EQ(v.lookup("a"), 2);
  EXPECT_EQ(v.lookup("zzz"), Vocabulary::kUnk);
  EXPECT_EQ(v.lookup(kMaskToken), Vocabulary::kUnk);
  EXPECT_EQ(v.size(), 8u);
  const std::vector<std::vector<std::string>> s = {{"x", std::string(kMaskToken), "x"}};
  EXPECT_EQ(Vocabulary::build(s).size(), 3u);
}

TEST(ModelTest, InitializationFollowsConventions) {
  const ModelConfig c{.embedding_dim = 5, .hidden = 3, .fc = 4, .num_labels = 2};
  StudentModel<double> m(c, small_vocab(), 7);
  const auto emb = m.embeddings().table.values();
  for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(emb[k], 0.0);
  for (std::size_t k = 5; k < emb.size(); ++k) EXPECT_LE(std::fabs(emb[k]), 0.25);
  const auto bias = m.encoder().forward.bias.values();
  for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(bias[j], (j >= 3 && j < 6) ? 1.0 : 0.0);
  const double limit = std::sqrt(6.0 / (5 + 12));
  for (double w : m.encoder().forward.input_weights.values()) EXPECT_LE(std::fabs(w), limit);
}

TEST(ModelTest, MatchesReferenceLstm) {
  const ModelConfig c{.embedding_dim = 3, .hidden = 2, .fc = 4, .num_labels = 2};
  StudentModel<double> m(c, small_vocab(), 3);
  const std::vector<std::int32_t> ids = {2, 5, 3, 7};
  const Tensor<double> enc = m.encode_sentence(ids, ids.size());
  const auto fwd = reference_lstm(m, m.encoder().forward, ids);
  const auto bwd = reference_lstm(m, m.encoder().backward, {7, 3, 5, 2});
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_NEAR(enc.at(j), fwd[j], 1e-14);
    EXPECT_NEAR(enc.at(2 + j), bwd[j], 1e-14);
  }
}

TEST(ModelTest, PaddingDoesNotChangeEncoding) {
  const ModelConfig c{.embedding_dim = 4, .hidden = 3, .fc = 4, .num_labels = 2};
  StudentModel<double> m(c, small_vocab(), 11);
  const std::vector<std::int32_t> ids = {2, 4, 6};
  const Tensor<double> plain = m.encode_sentence(ids, 3);
  const std::vector<std::int32_t> padded = {2, 4, 6, 0, 0, 0, 0};
  const Tensor<double> p = m.encode_sentence(padded, 3);
  for (std::size_t j = 0; j < plain.size(); ++j) EXPECT_EQ(plain.at(j), p.at(j));
  const std::vector<std::int32_t> bad = {2, 4, 6, 3};
  EXPECT_THROW(m.encode_sentence(bad, 3), DimensionError);
}

TEST(ModelTest, BatchRowsEqualSingleEncodings) {
  const ModelConfig c{.embedding_dim = 4, .hidden = 3, .fc = 4, .num_labels = 2};
  StudentModel<double> m(c, small_vocab(), 12);
  const std::vector<std::vector<std::int32_t>> sents = {{2}, {3, 4, 5, 6, 7}, {4, 4}};
  std::vector<std::span<const std::int32_t>> spans(sents.begin(), sents.end());
  const Tensor<double> batch = m.encode_batch(spans);
  for (std::size_t r = 0; r < sents.size(); ++r) {
    const Tensor<double> one = m.encode_sentence(sents[r], sents[r].size());
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(batch.at(r, j), one.at(j)) << r;
  }
}

TEST(ModelTest, ConcatCompareLayout) {
  const Tensor<double> a = Tensor<double>::vector({1, -2});
  const Tensor<double> b = Tensor<double>::vector({3, 5});
  const Tensor<double> f = concat_compare(a, b);
  const std::vector<double> want = {1, -2, 3, 5, 3, -10, 2, 7};
  ASSERT_EQ(f.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(f.at(i), want[i]);
}

TEST(ModelTest, PairForwardUsesSharedEncoder) {
  const ModelConfig c{.embedding_dim = 3, .hidden = 2, .fc = 4, .num_labels = 3,
                      .arity = Arity::kPair};
  StudentModel<double> m(c, small_vocab(), 5);
  TokenExample ex{{2, 3}, std::vector<std::int32_t>{4, 5, 6}};
  const Tensor<double> h1 = m.encode_sentence(ex.first, 2);
  const Tensor<double> h2 = m.encode_sentence(*ex.second, 3);
  const Tensor<double> want = m.classify(concat_compare(h1, h2));
  const Tensor<double> got = m.forward_logits(ex);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(got.at(i), want.at(i), 1e-15);
  EXPECT_THROW(m.forward_logits(TokenExample{{2, 3}, std::nullopt}), DimensionError);
}

TEST(ModelTest, ParameterCountMatchesClosedForm) {
  struct Case {
    std::size_t v, d, h, fc, k;
    Arity arity;
  };
  const Case cases[] = {{50, 300, 150, 200, 2, Arity::kSingle},
                        {50, 300, 150, 200, 3, Arity::kPair},
                        {30, 3, 2, 4, 2, Arity::kSingle},
                        {30, 16, 16, 32, 2, Arity::kSingle},
                        {30, 64, 64, 128, 3, Arity::kPair},
                        {30, 7, 5, 11, 4, Arity::kSingle}};
  for (const Case& cs : cases) {
    std::vector<std::vector<std::string>> words(1);
    for (std::size_t i = 0; i + 2 < cs.v; ++i) words[0].push_back("w" + std::to_string(i));
    const ModelConfig c{.embedding_dim = cs.d, .hidden = cs.h, .fc = cs.fc,
                        .num_labels = cs.k, .arity = cs.arity};
    StudentModel<float> m(c, Vocabulary::build(words), 1);
    EXPECT_EQ(m.count_parameters(false), testing::closed_form_parameters(c, 0));
    EXPECT_EQ(m.count_parameters(true), testing::closed_form_parameters(c, cs.v));
  }
  const ModelConfig reference{.embedding_dim = 300, .hidden = 150, .fc = 200, .num_labels = 2};
  EXPECT_EQ(testing::closed_form_parameters(reference, 0), 601802u);
}

TEST(ModelTest, StaticEmbeddingsAreNotTrainable) {
  ModelConfig c{.embedding_dim = 3, .hidden = 2, .fc = 4};
  StudentModel<float> m(c, small_vocab(), 1);
  EXPECT_EQ(m.trainable_parameters().size(), 11u);
  c.embedding_mode = EmbeddingMode::kStatic;
  StudentModel<float> s(c, small_vocab(), 1);
  EXPECT_EQ(s.trainable_parameters().size(), 10u);
  EXPECT_EQ(s.all_parameters().size(), 11u);
}

TEST(ModelTest, CloneIsIndependent) {
  StudentModel<float> m({.embedding_dim = 3, .hidden = 2, .fc = 4}, small_vocab(), 1);
  StudentModel<float> c = m.clone();
  c.head().output_bias.mutable_values()[0] = 42.0f;
  EXPECT_NE(m.head().output_bias.at(0), 42.0f);
  m.assign_parameters(c);
  EXPECT_EQ(m.head().output_bias.at(0), 42.0f);
}

// Whole-model gradient check at h=2, d_emb=3 over single and pair arity.
class ModelGradTest : public ::testing::TestWithParam<int> {};

TEST_P(ModelGradTest, FullModelMatchesFiniteDifferences) {
  const int seed = GetParam();
  for (Arity arity : {Arity::kSingle, Arity::kPair}) {
    const ModelConfig c{.embedding_dim = 3, .hidden = 2, .fc = 4, .num_labels = 3,
                        .arity = arity};
    StudentModel<double> m(c, small_vocab(), 100 + seed);
    std::vector<TokenExample> batch = {{{2, 3, 4}, std::nullopt},
                                       {{5}, std::nullopt},
                                       {{6, 7, 2, 2, 5}, std::nullopt}};
    if (arity == Arity::kPair) {
      batch[0].second = std::vector<std::int32_t>{7, 6};
      batch[1].second = std::vector<std::int32_t>{3, 4, 5, 6};
      batch[2].second = std::vector<std::int32_t>{1};
    }
    std::vector<const TokenExample*> ptrs;
    for (const auto& e : batch) ptrs.push_back(&e);
    const std::vector<std::size_t> labels = {0, 2, 1};
    const std::vector<double> teacher = {0.5, -1.0, 2.0, 1.0, 0.0, -0.3, -2.0, 1.5, 0.2};

    std::vector<Tensor<double>> params;
    for (const auto& p : m.all_parameters()) params.push_back(p.tensor);
    const auto r = testing::grad_check(params, [&](const std::vector<Tensor<double>>&) {
      return combined_loss(m.forward_batch(ptrs), std::span<const std::size_t>(labels),
                           std::span<const double>(teacher), DistillConfig{0.4});
    });
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed << ": " << r.worst;
    EXPECT_GT(r.checked, 100u);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ModelGradTest, ::testing::Range(0, 10));

}  // namespace
}  // namespace distill
