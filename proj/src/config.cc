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

#include "distill/config.h"

#include <algorithm>
#include <charconv>

#include "distill/errors.h"
#include "distill/file_util.h"

namespace distill {
namespace {

constexpr ConfigKey kKeys[] = {
    {"seed", ValueKind::kInt, "0", "seed for every random stream"},
    {"task", ValueKind::kString, "sst2", "task schema: sst2, qqp or mnli"},
    {"data-format", ValueKind::kString, "tagged",
     "format of non-JSONL data files: tagged (tagged corpus TSV) or glue"},
    {"input", ValueKind::kString, "", "input data file"},
    {"output", ValueKind::kString, "", "output file"},
    {"train", ValueKind::kString, "", "training data (tagged TSV, GLUE TSV or transfer JSONL)"},
    {"dev", ValueKind::kString, "", "dev data with gold labels"},
    {"checkpoint", ValueKind::kString, "", "model checkpoint to load"},
    {"teacher", ValueKind::kString, "", "reference-teacher checkpoint used for labeling"},
    {"logits", ValueKind::kString, "", "externally produced transfer JSONL to merge"},
    {"embeddings", ValueKind::kString, "", "word2vec text-format embedding file"},
    {"p-mask", ValueKind::kDouble, "0.1", "masking probability per word"},
    {"p-pos", ValueKind::kDouble, "0.1", "POS-guided replacement probability per word"},
    {"p-ng", ValueKind::kDouble, "0.25", "n-gram sampling probability per sentence"},
    {"n-iter", ValueKind::kInt, "20", "synthesis passes per example"},
    {"mode", ValueKind::kString, "distill", "training mode: distill or baseline"},
    {"alpha", ValueKind::kDouble, "0", "cross-entropy weight in the combined loss"},
    {"batch-size", ValueKind::kInt, "",
     "training batch size (default 50 for single-sentence tasks, 256 for pair tasks)"},
    {"max-epochs", ValueKind::kInt, "30", "epoch budget"},
    {"patience", ValueKind::kInt, "5", "epochs without dev improvement before stopping"},
    {"shuffle", ValueKind::kBool, "true", "shuffle training data every epoch"},
    {"rho", ValueKind::kDouble, "0.95", "AdaDelta decay"},
    {"epsilon", ValueKind::kDouble, "1e-6", "AdaDelta stabilizer"},
    {"learning-rate", ValueKind::kDouble, "1.0", "AdaDelta step multiplier"},
    {"embedding-dim", ValueKind::kInt, "300", "word embedding width"},
    {"hidden", ValueKind::kInt, "150", "LSTM hidden units per direction"},
    {"fc", ValueKind::kInt, "200", "ReLU hidden layer width"},
    {"embedding-mode", ValueKind::kString, "nonstatic", "static (frozen) or nonstatic"},
    {"bench-batch-size", ValueKind::kInt, "512", "inference batch size for bench"},
    {"bench-repetitions", ValueKind::kInt, "5", "timed repetitions for bench"},
};

const ConfigKey* find_key(std::string_view name) {
  for (const ConfigKey& k : kKeys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

template <typename V>
bool parse_number(std::string_view text, V& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

bool parse_bool(std::string_view text, bool& out) {
  if (text == "true" || text == "1" || text == "yes") return out = true, true;
  if (text == "false" || text == "0" || text == "no") return out = false, true;
  return false;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig::RunConfig() {
  for (const ConfigKey& k : kKeys) values_.emplace(std::string(k.name), std::string(k.default_value));
}

std::span<const ConfigKey> RunConfig::keys() { return kKeys; }

void RunConfig::set(std::string_view key, std::string_view value) {
  const ConfigKey* def = find_key(key);
  if (def == nullptr) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  bool ok = true;
  switch (def->kind) {
    case ValueKind::kString:
      break;
    case ValueKind::kInt: {
      std::int64_t v;
      ok = parse_number(value, v) && v >= 0;
      break;
    }
    case ValueKind::kDouble: {
      double v;
      ok = parse_number(value, v);
      break;
    }
    case ValueKind::kBool: {
      bool v;
      ok = parse_bool(value, v);
      break;
    }
  }
  if (!ok) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" +
                      std::string(key) + "'");
  }
  values_.find(key)->second = std::string(value);
}

void RunConfig::merge_text(std::string_view text, std::string_view source) {
  std::size_t line_no = 0, start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::merge_file(const std::filesystem::path& path) {
  merge_text(read_file(path), path.string());
}

const std::string& RunConfig::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  return it->second;
}

std::int64_t RunConfig::get_int(std::string_view key) const {
  std::int64_t v = 0;
  if (!parse_number(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not an integer");
  return v;
}

std::size_t RunConfig::get_size(std::string_view key) const {
  return static_cast<std::size_t>(get_int(key));
}

double RunConfig::get_double(std::string_view key) const {
  double v = 0;
  if (!parse_number(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not a number");
  return v;
}

bool RunConfig::get_bool(std::string_view key) const {
  bool v = false;
  if (!parse_bool(get(key), v)) throw ConfigError("key '" + std::string(key) + "' is not a boolean");
  return v;
}

std::uint64_t RunConfig::seed() const { return static_cast<std::uint64_t>(get_int("seed")); }

std::string RunConfig::dump() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

AugConfig aug_config(const RunConfig& c) {
  AugConfig a;
  a.p_mask = c.get_double("p-mask");
  a.p_pos = c.get_double("p-pos");
  a.p_ng = c.get_double("p-ng");
  a.n_iter = c.get_size("n-iter");
  a.seed = c.seed();
  try {
    a.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return a;
}

TrainConfig train_config(const RunConfig& c) {
  TrainConfig t;
  t.mode = parse_train_mode(c.get("mode"));
  t.alpha = c.get_double("alpha");
  if (c.has("batch-size")) {
    t.batch_size = c.get_size("batch-size");
  } else {
    t.batch_size = task_schema(task_of(c)).arity == Arity::kPair ? 256 : 50;
  }
  t.max_epochs = c.get_size("max-epochs");
  t.patience = c.get_size("patience");
  t.seed = c.seed();
  t.shuffle = c.get_bool("shuffle");
  t.rho = c.get_double("rho");
  t.epsilon = c.get_double("epsilon");
  t.learning_rate = c.get_double("learning-rate");
  t.validate();
  return t;
}

Task task_of(const RunConfig& c) { return parse_task(c.get("task")); }

ModelConfig model_config(const RunConfig& c) {
  const TaskSchema& schema = task_schema(task_of(c));
  ModelConfig m;
  m.embedding_dim = c.get_size("embedding-dim");
  m.hidden = c.get_size("hidden");
  m.fc = c.get_size("fc");
  m.num_labels = schema.num_labels();
  m.arity = schema.arity;
  const std::string& mode = c.get("embedding-mode");
  if (mode == "static") {
    m.embedding_mode = EmbeddingMode::kStatic;
  } else if (mode == "nonstatic") {
    m.embedding_mode = EmbeddingMode::kNonStatic;
  } else {
    throw ConfigError("embedding-mode must be static or nonstatic, got '" + mode + "'");
  }
  m.validate();
  return m;
}

}  // namespace distill
