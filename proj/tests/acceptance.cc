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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Criteria can be selected by number on the command
// line (e.g. `acceptance 1 4`).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "distill/augmentation.h"
#include "distill/bench.h"
#include "distill/checkpoint.h"
#include "distill/commands.h"
#include "distill/config.h"
#include "distill/data_io.h"
#include "distill/distillation.h"
#include "distill/experiment.h"
#include "distill/file_util.h"
#include "distill/ops.h"
#include "distill/synthetic.h"
#include "gradcheck.h"
#include "param_count.h"
#include "test_util.h"

namespace distill {
namespace {

using Clock = std::chrono::steady_clock;
using TD = Tensor<double>;
using Inputs = std::vector<TD>;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// 1 -------------------------------------------------------------------------

TD weighted_sum(const TD& t) {
  std::vector<double> w(t.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i);
  return sum(mul(t, TD(t.shape(), w)));
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  struct OpCase {
    const char* name;
    std::vector<Shape> shapes;
    std::function<TD(const Inputs&)> f;
  };
  static const std::vector<std::int32_t> idx = {1, 3, 1, 2};
  static const std::vector<char> take = {1, 0, 1};
  static const std::vector<double> target = {0.3, -1.2, 0.8, 2.0, -0.5, 0.1};
  static const std::vector<std::size_t> labels = {2, 0};
  std::vector<OpCase> ops = {
      {"matmul", {{3, 4}, {4, 2}}, [](const Inputs& in) { return weighted_sum(matmul(in[0], in[1])); }},
      {"add", {{2, 3}, {2, 3}}, [](const Inputs& in) { return weighted_sum(add(in[0], in[1])); }},
      {"sub", {{2, 3}, {2, 3}}, [](const Inputs& in) { return weighted_sum(sub(in[0], in[1])); }},
      {"mul", {{2, 3}, {2, 3}}, [](const Inputs& in) { return weighted_sum(mul(in[0], in[1])); }},
      {"abs_diff", {{2, 3}, {2, 3}}, [](const Inputs& in) { return weighted_sum(abs_diff(in[0], in[1])); }},
      {"sigmoid", {{3, 2}}, [](const Inputs& in) { return weighted_sum(sigmoid(in[0])); }},
      {"tanh", {{3, 2}}, [](const Inputs& in) { return weighted_sum(tanh(in[0])); }},
      {"relu", {{3, 2}}, [](const Inputs& in) { return weighted_sum(relu(in[0])); }},
      {"softmax", {{3, 4}}, [](const Inputs& in) { return weighted_sum(softmax(in[0])); }},
      {"concat", {{2, 3}, {2, 1}}, [](const Inputs& in) { return weighted_sum(concat({in[0], in[1]})); }},
      {"sum", {{2, 3}}, [](const Inputs& in) { return scale(sum(in[0]), 1.7); }},
      {"scale", {{2, 3}}, [](const Inputs& in) { return weighted_sum(scale(in[0], -0.6)); }},
      {"replicate_rows", {{3}}, [](const Inputs& in) { return weighted_sum(replicate_rows(in[0], 4)); }},
      {"slice_cols", {{2, 5}}, [](const Inputs& in) { return weighted_sum(slice_cols(in[0], 1, 3)); }},
      {"reshape", {{2, 3}}, [](const Inputs& in) { return weighted_sum(reshape(in[0], {3, 2})); }},
      {"gather_rows", {{4, 3}}, [](const Inputs& in) {
         return weighted_sum(gather_rows(in[0], std::span<const std::int32_t>(idx)));
       }},
      {"select_rows", {{3, 2}, {3, 2}}, [](const Inputs& in) {
         return weighted_sum(select_rows(std::span<const char>(take), in[0], in[1]));
       }},
      {"squared_distance", {{2, 3}}, [](const Inputs& in) {
         return squared_distance(in[0], std::span<const double>(target));
       }},
      {"softmax_cross_entropy", {{2, 3}}, [](const Inputs& in) {
         return softmax_cross_entropy(in[0], std::span<const std::size_t>(labels));
       }},
  };
  constexpr int kSeeds = 10;
  double worst = 0.0;
  std::string worst_name;
  for (const OpCase& op : ops) {
    for (int seed = 0; seed < kSeeds; ++seed) {
      Rng rng(500 + seed);
      Inputs inputs;
      for (const Shape& s : op.shapes) inputs.push_back(testing::random_tensor(s, rng));
      const auto r = testing::grad_check(inputs, op.f);
      if (r.max_rel_error > worst) worst = r.max_rel_error, worst_name = op.name;
    }
  }
  // Full model, both arities, h = 2 and d_emb = 3.
  const std::vector<std::vector<std::string>> words = {{"a", "b", "c", "d", "e", "f"}};
  const Vocabulary vocab = Vocabulary::build(words);
  for (int seed = 0; seed < kSeeds; ++seed) {
    for (Arity arity : {Arity::kSingle, Arity::kPair}) {
      const ModelConfig c{.embedding_dim = 3, .hidden = 2, .fc = 4, .num_labels = 3,
                          .arity = arity};
      StudentModel<double> m(c, vocab, 900 + seed);
      std::vector<TokenExample> batch = {{{2, 3, 4}, std::nullopt}, {{5}, std::nullopt},
                                         {{6, 7, 2, 2, 5}, std::nullopt}};
      if (arity == Arity::kPair) {
        batch[0].second = std::vector<std::int32_t>{7, 6};
        batch[1].second = std::vector<std::int32_t>{3, 4, 5, 6};
        batch[2].second = std::vector<std::int32_t>{1};
      }
      std::vector<const TokenExample*> ptrs;
      for (const auto& e : batch) ptrs.push_back(&e);
      const std::vector<std::size_t> gold = {0, 2, 1};
      const std::vector<double> teacher = {0.5, -1.0, 2.0, 1.0, 0.0, -0.3, -2.0, 1.5, 0.2};
      Inputs params;
      for (const auto& p : m.all_parameters()) params.push_back(p.tensor);
      const auto r = testing::grad_check(params, [&](const Inputs&) {
        return combined_loss(m.forward_batch(ptrs), std::span<const std::size_t>(gold),
                             std::span<const double>(teacher), DistillConfig{0.4});
      });
      if (r.max_rel_error > worst) worst = r.max_rel_error, worst_name = "student model";
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && elapsed < 60.0,
          std::to_string(ops.size()) + " ops + student model, " + std::to_string(kSeeds) +
              " seeds, max rel error " + fmt("%.2e", worst) + " (" + worst_name + "), " +
              fmt("%.1f s", elapsed)};
}

// 2 -------------------------------------------------------------------------

Outcome loss_identities() {
  const std::vector<double> zeros = {0, 0};
  const double five = distill_loss(TD::vector({1, 2}), std::span<const double>(zeros)).item();
  bool ok = five == 5.0;
  const TD z = TD::matrix(3, 3, {0.3, -1.7, 2.2, 1, 0, -1, 4, 4, -4});
  const std::vector<double> teacher = {1.0, 0.25, -3.0, 0, 0, 4, 2, -2, 0.5};
  const std::vector<std::size_t> labels = {1, 2, 0};
  const double ce = cross_entropy(z, std::span<const std::size_t>(labels)).item();
  const double mse = distill_loss(z, std::span<const double>(teacher)).item();
  auto combined = [&](double alpha) {
    return combined_loss(z, std::span<const std::size_t>(labels),
                         std::span<const double>(teacher), DistillConfig{alpha})
        .item();
  };
  ok = ok && combined(0.0) == mse && combined(1.0) == ce;
  double max_dev = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double a = i / 100.0;
    max_dev = std::max(max_dev, std::fabs(combined(a) - (a * ce + (1 - a) * mse)));
  }
  ok = ok && max_dev <= 1e-12;
  return {ok, "distill_loss([1,2],[0,0]) = " + fmt("%g", five) +
                  ", endpoints exact, max deviation from linear " + fmt("%.1e", max_dev)};
}

// 3 -------------------------------------------------------------------------

Outcome augmentation_statistics() {
  const auto start = Clock::now();
  SyntheticTaskConfig sc;
  sc.train_size = 1000;
  sc.seed = 77;
  const auto corpus = make_synthetic_task(sc).train;
  std::size_t corpus_tokens = 0;
  for (const auto& ex : corpus) corpus_tokens += ex.first.tokens.size();
  const AugConfig cfg{.seed = 5};
  AugStats s1, s2;
  const std::string a = serialize_tagged_corpus(augment_corpus(corpus, cfg, &s1), true);
  const std::string b = serialize_tagged_corpus(augment_corpus(corpus, cfg, &s2), true);
  const bool in_range = s1.mask_rate() >= 0.08 && s1.mask_rate() <= 0.12 &&
                        s1.pos_rate() >= 0.08 && s1.pos_rate() <= 0.12 &&
                        s1.ngram_rate() >= 0.22 && s1.ngram_rate() <= 0.28;
  const bool identity = s1.masked + s1.pos_swapped + s1.kept == s1.tokens;
  const double elapsed = seconds_since(start);
  return {corpus_tokens >= 10000 && in_range && identity && a == b && elapsed < 60.0,
          std::to_string(corpus_tokens) + "-token corpus: mask " + fmt("%.4f", s1.mask_rate()) +
              ", pos " + fmt("%.4f", s1.pos_rate()) + ", n-gram " +
              fmt("%.4f", s1.ngram_rate()) + ", counter identity " +
              (identity ? "holds" : "broken") + ", reruns " +
              (a == b ? "byte-identical" : "differ") + ", " + fmt("%.1f s", elapsed)};
}

// 4 -------------------------------------------------------------------------

Outcome parameter_counting() {
  struct Case {
    std::size_t d, h, fc, k;
    Arity arity;
  };
  const Case cases[] = {{300, 150, 200, 2, Arity::kSingle}, {300, 150, 200, 3, Arity::kPair},
                        {16, 16, 32, 2, Arity::kSingle},    {3, 2, 4, 3, Arity::kPair},
                        {64, 64, 128, 2, Arity::kSingle},   {7, 5, 11, 4, Arity::kSingle}};
  const std::vector<std::vector<std::string>> words = {{"x", "y", "z"}};
  const Vocabulary vocab = Vocabulary::build(words);
  bool ok = true;
  std::size_t reference = 0;
  for (const Case& cs : cases) {
    const ModelConfig c{.embedding_dim = cs.d, .hidden = cs.h, .fc = cs.fc, .num_labels = cs.k,
                        .arity = cs.arity};
    const StudentModel<float> m(c, vocab, 1);
    ok = ok && m.count_parameters(false) == testing::closed_form_parameters(c, 0) &&
         m.count_parameters(true) == testing::closed_form_parameters(c, vocab.size());
    if (cs.d == 300 && cs.k == 2) reference = m.count_parameters(false);
  }
  ok = ok && reference == 601802;
  return {ok, std::to_string(std::size(cases)) + " configurations exact; (300,150,200,2) -> " +
                  std::to_string(reference) + " without embeddings"};
}

// 5 -------------------------------------------------------------------------

Outcome distillation_effect() {
  const auto start = Clock::now();
  const ExperimentConfig config;
  std::vector<double> diffs;
  std::size_t wins = 0;
  double min_teacher = 1.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ExperimentResult r = run_experiment(config, seed);
    const double d = r.distilled_accuracy - r.baseline_accuracy;
    diffs.push_back(d);
    wins += d > 0;
    min_teacher = std::min(min_teacher, r.teacher_accuracy);
    per_seed += (per_seed.empty() ? "" : " ") + fmt("%+.3f", d);
    std::printf("  seed %llu: teacher %.3f baseline %.3f distilled %.3f (transfer set %zu)\n",
                static_cast<unsigned long long>(seed), r.teacher_accuracy, r.baseline_accuracy,
                r.distilled_accuracy, r.transfer_size);
    std::fflush(stdout);
  }
  const double med = median(diffs);
  const double elapsed = seconds_since(start);
  return {min_teacher >= 0.95 && med >= 0.0 && wins >= 3 && elapsed < 600.0,
          "teacher min " + fmt("%.3f", min_teacher) + ", distilled - baseline [" + per_seed +
              "], median " + fmt("%+.3f", med) + ", wins " + std::to_string(wins) + "/5, " +
              fmt("%.0f s", elapsed)};
}

// 6 -------------------------------------------------------------------------

struct PipelineOutputs {
  std::string transfer;
  std::string teacher_history;
  std::string student_history;
};

PipelineOutputs run_pipeline(const std::filesystem::path& dir) {
  std::ostringstream log;
  auto cfg = [&] {
    RunConfig c;
    c.merge_text("seed = 21\nembedding-dim = 16\nhidden = 16\nfc = 32\nmax-epochs = 4\n"
                 "n-iter = 4\n");
    return c;
  };
  const std::string task = (dir / "task.tsv").string();
  RunConfig c = cfg();
  c.set("output", task);
  cmd_synth(c, log);
  c = cfg();
  c.set("input", task);
  c.set("output", (dir / "aug.tsv").string());
  cmd_augment(c, log);
  c = cfg();
  c.merge_text("mode = baseline\nhidden = 32\nembedding-dim = 32\n");
  c.set("train", task);
  c.set("dev", task + ".dev");
  c.set("output", (dir / "teacher.ckpt").string());
  cmd_train(c, log);
  c = cfg();
  c.set("input", (dir / "aug.tsv").string());
  c.set("teacher", (dir / "teacher.ckpt").string());
  c.set("output", (dir / "transfer.jsonl").string());
  cmd_label(c, log);
  c = cfg();
  c.set("train", (dir / "transfer.jsonl").string());
  c.set("dev", task + ".dev");
  c.set("output", (dir / "student.ckpt").string());
  cmd_train(c, log);
  return {read_file(dir / "transfer.jsonl"), read_file(dir / "teacher.ckpt.history.csv"),
          read_file(dir / "student.ckpt.history.csv")};
}

Outcome determinism() {
  const PipelineOutputs a = run_pipeline(testing::temp_dir("acceptance_run_a"));
  const PipelineOutputs b = run_pipeline(testing::temp_dir("acceptance_run_b"));
  const bool transfer = a.transfer == b.transfer && !a.transfer.empty();
  const bool history = a.student_history == b.student_history &&
                       a.teacher_history == b.teacher_history;
  const auto lines = std::count(a.transfer.begin(), a.transfer.end(), '\n');
  return {transfer && history, "augment -> label -> distill-train twice: transfer files (" +
                                   std::to_string(lines) + " lines) " +
                                   (transfer ? "identical" : "differ") + ", loss histories " +
                                   (history ? "identical" : "differ")};
}

// 7 -------------------------------------------------------------------------

Outcome round_trips() {
  const auto dir = testing::temp_dir("acceptance_roundtrip");
  bool ok = true;
  std::vector<std::string> failed;
  auto check = [&](const std::string& name, const std::filesystem::path& first,
                   const std::filesystem::path& second) {
    if (read_file(first) != read_file(second)) {
      ok = false;
      failed.push_back(name);
    }
  };

  // Dataset TSVs: one GLUE file per task, plus the tagged corpus.
  const std::pair<Task, std::string> glue[] = {
      {Task::kSst2, "sentence\tlabel\nA Fine film .\t1\nDull , dull\t0\n"},
      {Task::kQqp, "id\tqid1\tqid2\tquestion1\tquestion2\tis_duplicate\n"
                   "1\t1\t2\tHow do I cook?\tWhat is cooking?\t0\n"
                   "2\t3\t4\tWhy sky blue?\tWhy is the sky blue?\t1\n"},
      {Task::kMnli, "pairID\tsentence1\tsentence2\tgold_label\n"
                    "a1\tA man sleeps\tA person rests\tentailment\n"
                    "a2\tA man sleeps\tNobody sleeps\tcontradiction\n"
                    "a3\tA dog runs\tA dog runs home\tneutral\n"}};
  for (const auto& [task, text] : glue) {
    const std::string name = task_schema(task).name;
    write_file_atomic(dir / (name + ".raw.tsv"), text);
    const DatasetSplit s = read_dataset(dir / (name + ".raw.tsv"), task, SplitName::kDev);
    write_dataset(s, dir / (name + ".1.tsv"));
    write_dataset(read_dataset(dir / (name + ".1.tsv"), task, SplitName::kDev),
                  dir / (name + ".2.tsv"));
    check(name + " TSV", dir / (name + ".1.tsv"), dir / (name + ".2.tsv"));
  }
  SyntheticTaskConfig sc;
  sc.train_size = 40;
  const auto aug = augment_corpus(make_synthetic_task(sc).train, AugConfig{.n_iter = 3});
  write_tagged_corpus(aug, dir / "tagged.1.tsv", true);
  write_tagged_corpus(read_tagged_corpus(dir / "tagged.1.tsv"), dir / "tagged.2.tsv", true);
  check("tagged TSV", dir / "tagged.1.tsv", dir / "tagged.2.tsv");

  // Transfer JSONL with awkward doubles and pairs.
  std::vector<TransferRecord> records;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    TransferRecord r;
    r.text_a = "text \"" + std::to_string(i) + "\" \\ \xc3\xa9";
    if (i % 2) r.text_b = "second " + std::to_string(i);
    r.logits = {rng.uniform(-1e3, 1e3), rng.uniform(-1e-9, 1e-9), 1.0 / 3.0 * i};
    r.label = argmax(r.logits);
    r.provenance = i % 3 ? Provenance::kSynthetic : Provenance::kOriginal;
    if (r.provenance == Provenance::kOriginal) r.gold = i % 3;
    records.push_back(std::move(r));
  }
  write_transfer_set(records, dir / "t.1.jsonl");
  write_transfer_set(read_transfer_set(dir / "t.1.jsonl", 3), dir / "t.2.jsonl");
  check("transfer JSONL", dir / "t.1.jsonl", dir / "t.2.jsonl");

  // Checkpoints in both widths.
  const std::vector<std::vector<std::string>> words = {{"p", "q", "r", "s"}};
  const StudentModel<float> mf({.embedding_dim = 6, .hidden = 5, .fc = 7, .num_labels = 3,
                                .arity = Arity::kPair},
                               Vocabulary::build(words), 8);
  save_checkpoint(mf, dir / "f.1.ckpt");
  save_checkpoint(load_checkpoint<float>(dir / "f.1.ckpt"), dir / "f.2.ckpt");
  check("float checkpoint", dir / "f.1.ckpt", dir / "f.2.ckpt");
  const StudentModel<double> md({.embedding_dim = 4, .hidden = 3, .fc = 5},
                                Vocabulary::build(words), 9);
  save_checkpoint(md, dir / "d.1.ckpt");
  save_checkpoint(load_checkpoint<double>(dir / "d.1.ckpt"), dir / "d.2.ckpt");
  check("double checkpoint", dir / "d.1.ckpt", dir / "d.2.ckpt");

  std::string detail = "GLUE TSV (3 tasks), tagged TSV, transfer JSONL, float and double checkpoints";
  if (!failed.empty()) {
    detail += "; differ:";
    for (const auto& f : failed) detail += " " + f;
  } else {
    detail += ": second writes byte-identical";
  }
  return {ok, detail};
}

// 8 -------------------------------------------------------------------------

std::string field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  if (pos == std::string::npos) return "";
  const auto end = text.find('\n', pos);
  return text.substr(pos + key.size() + 1, end - pos - key.size() - 1);
}

Outcome bench() {
  const auto dir = testing::temp_dir("acceptance_bench");
  SyntheticTaskConfig sc;
  sc.train_size = 200;
  const auto task = make_synthetic_task(sc);
  write_tagged_corpus(task.dev, dir / "dev.tsv", false);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& ex : task.train) sentences.push_back(ex.first.tokens);
  const ModelConfig c{.embedding_dim = 16, .hidden = 16, .fc = 32};
  const StudentModel<float> model(c, Vocabulary::build(sentences), 4);
  save_checkpoint(model, dir / "toy.ckpt");

  RunConfig rc;
  rc.set("checkpoint", (dir / "toy.ckpt").string());
  rc.set("input", (dir / "dev.tsv").string());
  rc.set("bench-repetitions", "5");
  std::ostringstream first, second;
  cmd_bench(rc, first);
  cmd_bench(rc, second);
  const std::string with = field(first.str(), "parameters_with_embeddings");
  const std::string without = field(first.str(), "parameters_without_embeddings");
  const double throughput = std::stod(field(first.str(), "sentences_per_second"));
  const bool counts = without == std::to_string(testing::closed_form_parameters(c, 0)) &&
                      with == std::to_string(
                                  testing::closed_form_parameters(c, model.vocab().size()));
  const bool stable =
      with == field(second.str(), "parameters_with_embeddings") &&
      without == field(second.str(), "parameters_without_embeddings");
  return {counts && stable && throughput > 0.0,
          "parameters " + without + " without / " + with + " with embeddings (closed form " +
              (counts ? "matches" : "differs") + ", repeat " + (stable ? "identical" : "differs") +
              "), " + fmt("%.0f sentences/s", throughput)};
}

}  // namespace
}  // namespace distill

int main(int argc, char** argv) {
  using distill::Outcome;
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"gradient suite", distill::gradient_suite},
      {"loss identities", distill::loss_identities},
      {"augmentation statistics", distill::augmentation_statistics},
      {"parameter counting", distill::parameter_counting},
      {"desk-scale distillation effect", distill::distillation_effect},
      {"determinism", distill::determinism},
      {"round-trips", distill::round_trips},
      {"bench", distill::bench},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (int i = 0; i < static_cast<int>(std::size(criteria)); ++i) {
    if (!selected.empty() && !selected.contains(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
