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

#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "distill/bench.h"
#include "distill/checkpoint.h"
#include "distill/commands.h"
#include "distill/config.h"
#include "distill/errors.h"
#include "distill/file_util.h"
#include "param_count.h"
#include "test_util.h"

namespace distill {
namespace {

namespace fs = std::filesystem;

TEST(RunConfigTest, DefaultsFileAndValidation) {
  RunConfig c;
  EXPECT_EQ(c.get_double("p-mask"), 0.1);
  EXPECT_EQ(c.get_size("n-iter"), 20u);
  EXPECT_EQ(c.get("mode"), "distill");
  c.merge_text("# comment\nseed = 7\n  alpha=0.25  # trailing\n\n");
  EXPECT_EQ(c.seed(), 7u);
  EXPECT_EQ(train_config(c).alpha, 0.25);
  EXPECT_THROW(c.set("nope", "1"), ConfigError);
  EXPECT_THROW(c.set("batch-size", "-3"), ConfigError);
  EXPECT_THROW(c.set("shuffle", "maybe"), ConfigError);
  try {
    c.merge_text("seed = 1\nalpha = x\n", "run.cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("run.cfg:2"), std::string::npos);
  }
  c.set("p-mask", "0.95");
  EXPECT_THROW(aug_config(c), ConfigError);
  c.set("task", "mnli");
  EXPECT_EQ(model_config(c).num_labels, 3u);
  EXPECT_EQ(model_config(c).arity, Arity::kPair);
  EXPECT_NE(c.dump().find("task = mnli\n"), std::string::npos);
}

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::temp_dir(std::string("pipeline_") +
                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunConfig base() const {
    RunConfig c;
    c.merge_text(
        "seed = 3\nembedding-dim = 8\nhidden = 8\nfc = 16\nmax-epochs = 3\n"
        "n-iter = 2\nbench-repetitions = 5\n");
    return c;
  }

  fs::path dir_;
};

TEST_F(PipelineTest, SynthAugmentLabelTrainEvalBench) {
  std::ostringstream log;
  RunConfig c = base();
  c.set("output", path("task.tsv"));
  cmd_synth(c, log);
  ASSERT_TRUE(fs::exists(path("task.tsv.dev")));
  ASSERT_TRUE(fs::exists(path("task.tsv.config")));

  c = base();
  c.set("input", path("task.tsv"));
  c.set("output", path("aug.tsv"));
  cmd_augment(c, log);
  const std::string stats = read_file(path("aug.tsv.stats"));
  EXPECT_NE(stats.find("mask_rate="), std::string::npos);

  c = base();
  c.merge_text("mode = baseline\nhidden = 12\n");
  c.set("train", path("task.tsv"));
  c.set("dev", path("task.tsv.dev"));
  c.set("output", path("teacher.ckpt"));
  cmd_train(c, log);
  EXPECT_EQ(read_file(path("teacher.ckpt.history.csv")).rfind("epoch,train_loss", 0), 0u);

  c = base();
  c.set("input", path("aug.tsv"));
  c.set("teacher", path("teacher.ckpt"));
  c.set("output", path("transfer.jsonl"));
  cmd_label(c, log);
  const auto records = read_transfer_set(path("transfer.jsonl"), 2);
  EXPECT_EQ(records.size(), read_tagged_corpus(path("aug.tsv")).size());

  c = base();
  c.set("train", path("transfer.jsonl"));
  c.set("dev", path("task.tsv.dev"));
  c.set("output", path("student.ckpt"));
  cmd_train(c, log);

  std::ostringstream eval_out;
  c = base();
  c.set("checkpoint", path("student.ckpt"));
  c.set("input", path("task.tsv.dev"));
  cmd_eval(c, eval_out);
  EXPECT_EQ(eval_out.str().rfind("{\"count\":500,\"accuracy\":", 0), 0u) << eval_out.str();

  std::ostringstream bench_out;
  c.set("bench-batch-size", "64");
  cmd_bench(c, bench_out);
  const StudentModel<float> student = load_checkpoint<float>(path("student.ckpt"));
  const std::string want = "parameters_without_embeddings=" +
                           std::to_string(testing::closed_form_parameters(student.config(), 0));
  EXPECT_NE(bench_out.str().find(want), std::string::npos) << bench_out.str();
}

TEST_F(PipelineTest, DistillModeRejectsUnlabeledTsv) {
  std::ostringstream log;
  RunConfig c = base();
  c.set("output", path("task.tsv"));
  cmd_synth(c, log);
  c = base();
  c.set("train", path("task.tsv"));
  c.set("dev", path("task.tsv.dev"));
  c.set("output", path("s.ckpt"));
  EXPECT_THROW(cmd_train(c, log), ConfigError);
  c.set("train", "");
  EXPECT_THROW(cmd_train(c, log), ConfigError);
}

// A logits file in the shape an external teacher emits: raw-cased text, no
// ids, one record per example of a 10-example corpus.
TEST_F(PipelineTest, MergesExternalLogitsByText) {
  std::string corpus = "id\ttokens_a\ttags_a\tlabel\n";
  std::string jsonl;
  for (int i = 0; i < 10; ++i) {
    const std::string text = "Sentence number " + std::to_string(i);
    corpus += "s" + std::to_string(i) + "\t" + text + "\tN N N\t" + std::to_string(i % 2) + "\n";
    const double z = i % 2 ? 1.5 : -1.5;
    jsonl += "{\"text_a\":\"" + text + "\",\"text_b\":null,\"logits\":[" +
             std::to_string(-z) + "," + std::to_string(z) + "],\"label\":" +
             std::to_string(i % 2) + ",\"provenance\":\"original\",\"gold\":" +
             std::to_string(i % 2) + "}\n";
  }
  write_file_atomic(path("corpus.tsv"), corpus);
  write_file_atomic(path("external.jsonl"), jsonl);
  EXPECT_EQ(parse_transfer_set(jsonl, 2).size(), 10u);

  std::ostringstream log;
  RunConfig c = base();
  c.set("input", path("corpus.tsv"));
  c.set("logits", path("external.jsonl"));
  c.set("output", path("merged.jsonl"));
  cmd_label(c, log);
  const auto merged = read_transfer_set(path("merged.jsonl"), 2);
  ASSERT_EQ(merged.size(), 10u);
  EXPECT_EQ(merged[3].text_a, "sentence number 3");
  EXPECT_EQ(merged[3].label, 1u);
  EXPECT_EQ(merged[3].gold, 1u);

  write_file_atomic(path("corpus.tsv"), corpus + "extra\tunseen words\tN N\t0\n");
  try {
    cmd_label(c, log);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("'extra'"), std::string::npos) << e.what();
  }
  c.set("teacher", path("whatever.ckpt"));
  EXPECT_THROW(cmd_label(c, log), ConfigError);
}

TEST_F(PipelineTest, AugmentBoundsOnSmallCorpus) {
  std::ostringstream log;
  RunConfig c = base();
  c.set("output", path("task.tsv"));
  cmd_synth(c, log);
  const std::vector<TaggedExample> full = read_tagged_corpus(path("task.tsv"));
  const std::vector<TaggedExample> ten(full.begin(), full.begin() + 10);
  write_tagged_corpus(ten, path("ten.tsv"), /*with_provenance=*/false);

  c = RunConfig();
  c.set("input", path("ten.tsv"));
  c.set("output", path("ten_aug.tsv"));
  cmd_augment(c, log);
  const std::vector<TaggedExample> augmented = read_tagged_corpus(path("ten_aug.tsv"));
  EXPECT_GT(augmented.size(), 10u);
  EXPECT_LE(augmented.size(), 210u);

  c.merge_text("p-mask = 0\np-pos = 0\np-ng = 0\n");
  cmd_augment(c, log);
  const std::vector<TaggedExample> only = read_tagged_corpus(path("ten_aug.tsv"));
  ASSERT_EQ(only.size(), 10u);
  for (std::size_t i = 0; i < only.size(); ++i) {
    EXPECT_EQ(only[i].provenance, Provenance::kOriginal);
    EXPECT_EQ(only[i].first.tokens, ten[i].first.tokens);
  }
}

TEST_F(PipelineTest, BatchSizeDefaultsFollowTaskArity) {
  RunConfig c;
  EXPECT_EQ(train_config(c).batch_size, 50u);
  c.set("task", "qqp");
  EXPECT_EQ(train_config(c).batch_size, 256u);
  c.set("batch-size", "32");
  EXPECT_EQ(train_config(c).batch_size, 32u);
}

TEST_F(PipelineTest, BenchNeedsFiveRepetitions) {
  std::ostringstream log;
  RunConfig c = base();
  c.set("output", path("task.tsv"));
  cmd_synth(c, log);
  c = base();
  c.merge_text("mode = baseline\nmax-epochs = 1\n");
  c.set("train", path("task.tsv"));
  c.set("dev", path("task.tsv.dev"));
  c.set("output", path("m.ckpt"));
  cmd_train(c, log);
  c = base();
  c.set("checkpoint", path("m.ckpt"));
  c.set("input", path("task.tsv.dev"));
  c.set("bench-repetitions", "4");
  EXPECT_THROW(cmd_bench(c, log), ConfigError);
  c.set("bench-repetitions", "5");
  std::ostringstream out;
  cmd_bench(c, out);
  EXPECT_NE(out.str().find("sentences_per_second="), std::string::npos) << out.str();
}

TEST(BenchTest, CountsAreStableAndThroughputPositive) {
  const std::vector<std::vector<std::string>> s = {{"a", "b", "c"}};
  const ModelConfig c{.embedding_dim = 16, .hidden = 16, .fc = 32};
  const StudentModel<float> m(c, Vocabulary::build(s), 1);
  std::vector<TokenExample> inputs(100, TokenExample{{2, 3, 4, 2}, std::nullopt});
  const BenchReport a = bench_inference(m, inputs, 32, 3);
  const BenchReport b = bench_inference(m, inputs, 32, 3);
  EXPECT_EQ(a.parameters_without_embeddings, testing::closed_form_parameters(c, 0));
  EXPECT_EQ(a.parameters_with_embeddings, testing::closed_form_parameters(c, 5));
  EXPECT_EQ(a.parameters_with_embeddings, b.parameters_with_embeddings);
  EXPECT_GT(a.sentences_per_second, 0.0);
  EXPECT_EQ(a.seconds.size(), 3u);
  EXPECT_EQ(median({3.0, 1.0, 2.0, 10.0}), 2.5);
}

}  // namespace
}  // namespace distill
