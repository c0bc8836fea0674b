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

#include "distill/commands.h"

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "distill/bench.h"
#include "distill/checkpoint.h"
#include "distill/errors.h"
#include "distill/file_util.h"
#include "distill/synthetic.h"
#include "distill/training.h"

namespace distill {
namespace {

const std::string& require(const RunConfig& config, std::string_view key) {
  if (!config.has(key)) throw ConfigError("--" + std::string(key) + " is required");
  return config.get(key);
}

bool is_jsonl(const std::string& path) {
  return path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
}

void echo_config(const RunConfig& config, const std::string& output) {
  write_file_atomic(output + ".config", config.dump());
}

void check_arity(std::span<const TaggedExample> examples, const TaskSchema& schema,
                 const std::string& path) {
  const bool pair = schema.arity == Arity::kPair;
  for (const TaggedExample& ex : examples) {
    if (ex.is_pair() != pair) {
      throw FormatError(path + ": example '" + ex.id + "' is " +
                        (ex.is_pair() ? "a pair" : "a single sentence") + " but task " +
                        schema.name + " expects " + (pair ? "pairs" : "single sentences"));
    }
    if (ex.gold_label && *ex.gold_label >= schema.num_labels()) {
      throw FormatError(path + ": example '" + ex.id + "' has label " +
                        std::to_string(*ex.gold_label) + " outside the " +
                        std::to_string(schema.num_labels()) + " labels of " + schema.name);
    }
  }
}

// Tagged TSV or GLUE TSV, per data-format.
std::vector<TaggedExample> load_corpus(const RunConfig& config, const std::string& path,
                                       SplitName split) {
  const Task task = task_of(config);
  const std::string& format = config.get("data-format");
  std::vector<TaggedExample> examples;
  if (format == "tagged") {
    examples = read_tagged_corpus(path);
  } else if (format == "glue") {
    examples = read_dataset(path, task, split).examples;
  } else {
    throw ConfigError("unknown data format '" + format + "' (expected tagged or glue)");
  }
  check_arity(examples, task_schema(task), path);
  return examples;
}

struct LoadedData {
  std::vector<std::vector<std::string>> sentences;  // for vocabulary building
  std::vector<TaggedExample> corpus;                 // non-JSONL input
  std::vector<TransferRecord> records;               // JSONL input
  bool jsonl = false;
};

LoadedData load_any(const RunConfig& config, const std::string& path, SplitName split) {
  LoadedData d;
  const TaskSchema& schema = task_schema(task_of(config));
  if (is_jsonl(path)) {
    d.jsonl = true;
    d.records = read_transfer_set(path, schema.num_labels());
    for (const TransferRecord& r : d.records) {
      if (r.text_b.has_value() != (schema.arity == Arity::kPair)) {
        throw FormatError(path + ": record arity does not match task " + schema.name);
      }
      d.sentences.push_back(tokenize(r.text_a));
      if (r.text_b) d.sentences.push_back(tokenize(*r.text_b));
    }
  } else {
    d.corpus = load_corpus(config, path, split);
    for (const TaggedExample& ex : d.corpus) {
      d.sentences.push_back(ex.first.tokens);
      if (ex.second) d.sentences.push_back(ex.second->tokens);
    }
  }
  return d;
}

std::vector<TrainingExample> encode_all(const LoadedData& d, const Vocabulary& vocab) {
  std::vector<TrainingExample> out;
  if (d.jsonl) {
    for (const TransferRecord& r : d.records) out.push_back(encode_record(r, vocab));
  } else {
    for (const TaggedExample& ex : d.corpus) out.push_back(encode_example(ex, vocab));
  }
  return out;
}

void check_model_task(const StudentModel<float>& model, const RunConfig& config,
                      const std::string& path) {
  const TaskSchema& schema = task_schema(task_of(config));
  if (model.config().num_labels != schema.num_labels() || model.config().arity != schema.arity) {
    throw ConfigError(path + ": checkpoint does not match task " + schema.name);
  }
}

std::string text_key(std::string_view a, const std::optional<std::string>& b) {
  std::string key = join_tokens(tokenize(a));
  if (b) key += "\t" + join_tokens(tokenize(*b));
  return key;
}

std::string stats_text(const AugStats& s) {
  std::ostringstream os;
  os << "tokens=" << s.tokens << "\n"
     << "masked=" << s.masked << "\n"
     << "pos_swapped=" << s.pos_swapped << "\n"
     << "kept=" << s.kept << "\n"
     << "mask_rate=" << s.mask_rate() << "\n"
     << "pos_rate=" << s.pos_rate() << "\n"
     << "ngram_opportunities=" << s.ngram_opportunities << "\n"
     << "ngram_triggered=" << s.ngram_triggered << "\n"
     << "ngram_rate=" << s.ngram_rate() << "\n";
  for (std::size_t n = 1; n <= 5; ++n) os << "ngram_n" << n << "=" << s.ngram_lengths[n] << "\n";
  os << "synthesized=" << s.synthesized << "\n"
     << "duplicates=" << s.duplicates << "\n";
  return os.str();
}

}  // namespace

void cmd_augment(const RunConfig& config, std::ostream& out) {
  const std::string& input = require(config, "input");
  const std::string& output = require(config, "output");
  const AugConfig aug = aug_config(config);
  aug.validate();
  const std::vector<TaggedExample> corpus = load_corpus(config, input, SplitName::kTrain);
  AugStats stats;
  const std::vector<TaggedExample> augmented = augment_corpus(corpus, aug, &stats);
  write_tagged_corpus(augmented, output, /*with_provenance=*/true);
  write_file_atomic(output + ".stats", stats_text(stats));
  echo_config(config, output);
  out << "originals=" << corpus.size() << " synthetic=" << augmented.size() - corpus.size()
      << " duplicates=" << stats.duplicates << " mask_rate=" << stats.mask_rate()
      << " pos_rate=" << stats.pos_rate() << " ngram_rate=" << stats.ngram_rate() << "\n";
}

void cmd_label(const RunConfig& config, std::ostream& out) {
  const std::string& input = require(config, "input");
  const std::string& output = require(config, "output");
  const TaskSchema& schema = task_schema(task_of(config));
  const std::vector<TaggedExample> corpus = load_corpus(config, input, SplitName::kTrain);

  std::vector<TransferRecord> records;
  if (config.has("teacher") == config.has("logits")) {
    throw ConfigError("label needs exactly one of --teacher or --logits");
  }
  if (config.has("teacher")) {
    const std::string& path = config.get("teacher");
    StudentModel<float> model = load_checkpoint<float>(path);
    check_model_task(model, config, path);
    const ReferenceTeacher teacher(std::move(model));
    records = label_corpus(corpus, teacher.model().vocab(), teacher.as_function());
  } else {
    const std::string& path = config.get("logits");
    const std::vector<TransferRecord> external = read_transfer_set(path, schema.num_labels());
    std::map<std::string, const TransferRecord*> by_text;
    for (const TransferRecord& r : external) by_text.emplace(text_key(r.text_a, r.text_b), &r);
    for (const TaggedExample& ex : corpus) {
      std::optional<std::string> b;
      if (ex.second) b = join_tokens(ex.second->tokens);
      const auto it = by_text.find(text_key(join_tokens(ex.first.tokens), b));
      if (it == by_text.end()) {
        throw FormatError(path + ": no teacher logits for example '" + ex.id + "'");
      }
      TransferRecord r;
      r.text_a = join_tokens(ex.first.tokens);
      r.text_b = b;
      r.logits = it->second->logits;
      r.label = argmax(r.logits);
      r.provenance = ex.provenance;
      if (ex.provenance == Provenance::kOriginal) r.gold = ex.gold_label;
      records.push_back(std::move(r));
    }
  }
  write_transfer_set(records, output);
  // Read back through the strict parser so a bad file never goes unnoticed.
  const std::size_t checked = read_transfer_set(output, schema.num_labels()).size();
  echo_config(config, output);
  out << "records=" << checked << "\n";
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  const std::string& train_path = require(config, "train");
  const std::string& dev_path = require(config, "dev");
  const std::string& output = require(config, "output");
  const TrainConfig tc = train_config(config);
  tc.validate();
  const ModelConfig mc = model_config(config);
  mc.validate();

  const LoadedData train_set = load_any(config, train_path, SplitName::kTrain);
  if (tc.mode == TrainMode::kDistill && !train_set.jsonl) {
    throw ConfigError("distill mode needs a transfer JSONL training file");
  }
  const LoadedData dev_set = load_any(config, dev_path, SplitName::kDev);

  const Vocabulary vocab = Vocabulary::build(train_set.sentences);
  StudentModel<float> model(mc, vocab, derive_seed(config.seed(), 1));
  if (config.has("embeddings")) {
    LoadedEmbeddings<float> emb = load_embeddings<float>(
        config.get("embeddings"), vocab, mc.embedding_dim, derive_seed(config.seed(), 2),
        mc.embedding_mode);
    model.set_embedding_table(std::move(emb.table.table));
    out << "embedding_coverage=" << emb.coverage << "\n";
  }

  const std::vector<TrainingExample> train_data = encode_all(train_set, vocab);
  const std::vector<TrainingExample> dev_data = encode_all(dev_set, vocab);
  const TrainResult<float> result = train(model, train_data, dev_data, tc);

  save_checkpoint(result.model, output);
  write_file_atomic(output + ".history.csv", history_csv(result.history));
  echo_config(config, output);
  out << "epochs=" << result.history.size() << " best_epoch=" << result.best_epoch
      << " best_dev_accuracy=" << result.best_dev_accuracy << "\n";
}

void cmd_eval(const RunConfig& config, std::ostream& out) {
  const std::string& ckpt = require(config, "checkpoint");
  const std::string& input = require(config, "input");
  const StudentModel<float> model = load_checkpoint<float>(ckpt);
  check_model_task(model, config, ckpt);
  const LoadedData data = load_any(config, input, SplitName::kDev);
  const std::vector<TrainingExample> examples = encode_all(data, model.vocab());
  const std::string json = evaluate(model, examples).to_json();
  out << json << "\n";
  if (config.has("output")) {
    write_file_atomic(config.get("output"), json + "\n");
    echo_config(config, config.get("output"));
  }
}

void cmd_bench(const RunConfig& config, std::ostream& out) {
  const std::string& ckpt = require(config, "checkpoint");
  const std::string& input = require(config, "input");
  const StudentModel<float> model = load_checkpoint<float>(ckpt);
  check_model_task(model, config, ckpt);
  const std::size_t repetitions = config.get_size("bench-repetitions");
  if (repetitions < 5) throw ConfigError("--bench-repetitions must be at least 5");
  const LoadedData data = load_any(config, input, SplitName::kTest);
  std::vector<TokenExample> inputs;
  for (TrainingExample& ex : encode_all(data, model.vocab())) inputs.push_back(std::move(ex.tokens));
  const BenchReport report = bench_inference(model, inputs, config.get_size("bench-batch-size"),
                                             repetitions);
  out << report.to_text();
  if (config.has("output")) {
    write_file_atomic(config.get("output"), report.to_text());
    echo_config(config, config.get("output"));
  }
}

void cmd_synth(const RunConfig& config, std::ostream& out) {
  const std::string& output = require(config, "output");
  SyntheticTaskConfig sc;
  sc.seed = config.seed();
  const SyntheticTask task = make_synthetic_task(sc);
  write_tagged_corpus(task.train, output, /*with_provenance=*/false);
  write_tagged_corpus(task.dev, output + ".dev", /*with_provenance=*/false);
  echo_config(config, output);
  out << "train=" << task.train.size() << " dev=" << task.dev.size() << "\n";
}

}  // namespace distill
