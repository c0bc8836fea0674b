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

#include "distill/data_io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "distill/distillation.h"
#include "distill/errors.h"
#include "distill/file_util.h"
#include "distill/rng.h"
#include "json.hpp"

namespace distill {
namespace {

using json = nlohmann::json;

// Lines of `contents` without the trailing newline of the last line.
std::vector<std::string_view> split_lines(std::string_view contents) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(std::string_view source, std::size_t line, const std::string& what) {
  throw FormatError(std::string(source) + ":" + std::to_string(line) + ": " + what);
}

std::optional<std::size_t> parse_index(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return std::nullopt;
  }
  return value;
}

// 17 significant digits round-trip every double. Negative zero is written
// as 0, since JSON readers parse "-0" as the integer 0 anyway.
std::string format_double(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens = split_whitespace(text);
  for (std::string& t : tokens) {
    if (t == kMaskToken) continue;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::optional<std::size_t> TaskSchema::parse_label(std::string_view text) const {
  for (std::size_t i = 0; i < label_names.size(); ++i) {
    if (text == label_names[i]) return i;
  }
  const auto index = parse_index(text);
  if (index && *index < label_names.size()) return index;
  return std::nullopt;
}

const TaskSchema& task_schema(Task task) {
  static const TaskSchema kSst2{Task::kSst2, "sst2", Arity::kSingle, {"negative", "positive"}};
  static const TaskSchema kQqp{Task::kQqp, "qqp", Arity::kPair, {"not_duplicate", "duplicate"}};
  static const TaskSchema kMnli{
      Task::kMnli, "mnli", Arity::kPair, {"entailment", "neutral", "contradiction"}};
  switch (task) {
    case Task::kSst2: return kSst2;
    case Task::kQqp: return kQqp;
    case Task::kMnli: return kMnli;
  }
  throw std::invalid_argument("unknown task");
}

Task parse_task(std::string_view name) {
  if (name == "sst2") return Task::kSst2;
  if (name == "qqp") return Task::kQqp;
  if (name == "mnli") return Task::kMnli;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected sst2, qqp or mnli)");
}

SplitName parse_split(std::string_view name) {
  if (name == "train") return SplitName::kTrain;
  if (name == "dev") return SplitName::kDev;
  if (name == "test") return SplitName::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

namespace {

struct DatasetColumns {
  const char* id;
  const char* first;
  const char* second;  // nullptr for single-sentence tasks
  const char* label;
};

DatasetColumns columns_for(Task task) {
  switch (task) {
    case Task::kSst2: return {"index", "sentence", nullptr, "label"};
    case Task::kQqp: return {"id", "question1", "question2", "is_duplicate"};
    case Task::kMnli: return {"pairID", "sentence1", "sentence2", "gold_label"};
  }
  throw std::invalid_argument("unknown task");
}

TaggedSentence tag_sentence(std::string_view text, const PosLexicon* tagger) {
  const std::vector<std::string> tokens = tokenize(text);
  if (tagger != nullptr) return tagger->tag(tokens);
  TaggedSentence s;
  s.tokens = tokens;
  s.tags.assign(tokens.size(), std::string(kUnknownTag));
  return s;
}

}  // namespace

DatasetSplit parse_dataset(std::string_view contents, Task task, SplitName split,
                           const PosLexicon* tagger, std::string_view source) {
  const TaskSchema& schema = task_schema(task);
  const DatasetColumns cols = columns_for(task);
  const auto lines = split_lines(contents);
  if (lines.empty()) fail(source, 1, "missing header row");
  const auto header = split_on(lines[0], '\t');
  auto find = [&](const char* name) -> std::optional<std::size_t> {
    if (name == nullptr) return std::nullopt;
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto id_col = find(cols.id);
  const auto first_col = find(cols.first);
  const auto second_col = find(cols.second);
  const auto label_col = find(cols.label);
  if (!first_col) fail(source, 1, std::string("missing column '") + cols.first + "'");
  if (cols.second && !second_col) {
    fail(source, 1, std::string("missing column '") + cols.second + "'");
  }
  if (!label_col && split != SplitName::kTest) {
    fail(source, 1, std::string("missing label column '") + cols.label + "'");
  }

  DatasetSplit out{split, task, {}};
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = split_on(lines[i], '\t');
    if (fields.size() != header.size()) {
      fail(source, line_no, "expected " + std::to_string(header.size()) + " columns, got " +
                                std::to_string(fields.size()));
    }
    TaggedExample ex;
    ex.id = id_col ? std::string(fields[*id_col]) : std::to_string(i - 1);
    ex.first = tag_sentence(fields[*first_col], tagger);
    if (ex.first.tokens.empty()) fail(source, line_no, "empty sentence");
    if (second_col) {
      ex.second = tag_sentence(fields[*second_col], tagger);
      if (ex.second->tokens.empty()) fail(source, line_no, "empty second sentence");
    }
    if (label_col) {
      ex.gold_label = schema.parse_label(fields[*label_col]);
      if (!ex.gold_label) {
        fail(source, line_no, "label '" + std::string(fields[*label_col]) +
                                  "' is not in the " + schema.name + " label set");
      }
    }
    out.examples.push_back(std::move(ex));
  }
  return out;
}

DatasetSplit read_dataset(const std::filesystem::path& path, Task task, SplitName split,
                          const PosLexicon* tagger) {
  return parse_dataset(read_file(path), task, split, tagger, path.string());
}

std::string serialize_dataset(const DatasetSplit& split) {
  const TaskSchema& schema = task_schema(split.task);
  const DatasetColumns cols = columns_for(split.task);
  const bool labeled = std::any_of(split.examples.begin(), split.examples.end(),
                                   [](const TaggedExample& e) { return e.gold_label.has_value(); });
  const bool with_id = split.task != Task::kSst2;
  std::string out;
  if (with_id) out += std::string(cols.id) + "\t";
  out += cols.first;
  if (cols.second) out += std::string("\t") + cols.second;
  if (labeled) out += std::string("\t") + cols.label;
  out += "\n";
  for (const TaggedExample& ex : split.examples) {
    if (labeled && !ex.gold_label) {
      throw std::invalid_argument("example '" + ex.id + "' lacks a label in a labeled split");
    }
    if (with_id) out += ex.id + "\t";
    out += join_tokens(ex.first.tokens);
    if (cols.second) out += "\t" + join_tokens(ex.second.value().tokens);
    if (labeled) {
      out += "\t";
      out += split.task == Task::kMnli ? schema.label_names.at(*ex.gold_label)
                                        : std::to_string(*ex.gold_label);
    }
    out += "\n";
  }
  return out;
}

void write_dataset(const DatasetSplit& split, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_dataset(split));
}

std::vector<TaggedExample> parse_tagged_corpus(std::string_view contents,
                                               std::string_view source) {
  auto lines = split_lines(contents);
  std::size_t first = 0;
  if (!lines.empty() && split_on(lines[0], '\t')[0] == "id") first = 1;
  std::vector<TaggedExample> out;
  std::unordered_set<std::string> seen_ids;
  std::optional<bool> corpus_is_pair;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto f = split_on(lines[i], '\t');
    const bool pair = f.size() == 6 || f.size() == 7;
    const bool with_provenance = f.size() == 5 || f.size() == 7;
    if (f.size() < 4 || f.size() > 7) {
      fail(source, line_no, "expected 4 to 7 columns, got " + std::to_string(f.size()));
    }
    if (corpus_is_pair && *corpus_is_pair != pair) {
      fail(source, line_no, "mixes single-sentence and sentence-pair rows");
    }
    corpus_is_pair = pair;
    TaggedExample ex;
    ex.id = std::string(f[0]);
    if (ex.id.empty()) fail(source, line_no, "empty id");
    if (!seen_ids.insert(ex.id).second) fail(source, line_no, "duplicate id '" + ex.id + "'");
    auto read_sentence = [&](std::string_view tokens, std::string_view tags) {
      TaggedSentence s{tokenize(tokens), split_whitespace(tags)};
      if (s.tokens.empty()) fail(source, line_no, "empty sentence");
      if (s.tokens.size() != s.tags.size()) {
        fail(source, line_no, std::to_string(s.tokens.size()) + " tokens but " +
                                  std::to_string(s.tags.size()) + " tags");
      }
      return s;
    };
    ex.first = read_sentence(f[1], f[2]);
    std::size_t next = 3;
    if (pair) {
      ex.second = read_sentence(f[3], f[4]);
      next = 5;
    }
    if (f[next] != "-") {
      ex.gold_label = parse_index(f[next]);
      if (!ex.gold_label) {
        fail(source, line_no, "label must be a non-negative integer or '-', got '" +
                                  std::string(f[next]) + "'");
      }
    }
    if (with_provenance) {
      try {
        ex.provenance = parse_provenance(f[next + 1]);
      } catch (const std::invalid_argument& e) {
        fail(source, line_no, e.what());
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<TaggedExample> read_tagged_corpus(const std::filesystem::path& path) {
  return parse_tagged_corpus(read_file(path), path.string());
}

std::string serialize_tagged_corpus(std::span<const TaggedExample> examples,
                                    bool with_provenance) {
  const bool pair = !examples.empty() && examples.front().is_pair();
  std::string out = pair ? "id\ttokens_a\ttags_a\ttokens_b\ttags_b\tlabel"
                         : "id\ttokens_a\ttags_a\tlabel";
  if (with_provenance) out += "\tprovenance";
  out += "\n";
  for (const TaggedExample& ex : examples) {
    if (ex.is_pair() != pair) {
      throw std::invalid_argument("corpus mixes single-sentence and pair examples");
    }
    ex.first.validate();
    out += ex.id + "\t" + join_tokens(ex.first.tokens) + "\t" + join_tokens(ex.first.tags);
    if (pair) {
      ex.second->validate();
      out += "\t" + join_tokens(ex.second->tokens) + "\t" + join_tokens(ex.second->tags);
    }
    out += "\t" + (ex.gold_label ? std::to_string(*ex.gold_label) : std::string("-"));
    if (with_provenance) out += "\t" + std::string(provenance_name(ex.provenance));
    out += "\n";
  }
  return out;
}

void write_tagged_corpus(std::span<const TaggedExample> examples,
                         const std::filesystem::path& path, bool with_provenance) {
  write_file_atomic(path, serialize_tagged_corpus(examples, with_provenance));
}

template <typename T>
LoadedEmbeddings<T> parse_embeddings(std::string_view contents, const Vocabulary& vocab,
                                     std::size_t dim, std::uint64_t seed,
                                     EmbeddingMode mode, std::string_view source) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  const std::size_t v = vocab.size();
  std::vector<T> values(v * dim);
  Rng rng(seed);
  for (T& x : values) x = static_cast<T>(rng.uniform(-0.25, 0.25));
  std::fill_n(values.begin(), dim, T{0});

  std::vector<char> filled(v, 0), exact(v, 0);
  const auto lines = split_lines(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::vector<std::string> fields = split_whitespace(lines[i]);
    if (fields.empty()) fail(source, line_no, "blank line");
    if (i == 0 && fields.size() == 2 && parse_index(fields[0]) && parse_index(fields[1])) {
      if (*parse_index(fields[1]) != dim) {
        fail(source, line_no, "file dimension " + fields[1] + " does not match " +
                                  std::to_string(dim));
      }
      continue;
    }
    if (fields.size() != dim + 1) {
      fail(source, line_no, "dimension mismatch: expected " + std::to_string(dim) +
                                " values, got " + std::to_string(fields.size() - 1));
    }
    std::vector<T> row(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const std::string& text = fields[c + 1];
      double parsed = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), parsed);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(parsed)) {
        fail(source, line_no, "unparseable value '" + text + "'");
      }
      row[c] = static_cast<T>(parsed);
    }
    const std::string lowered = tokenize(fields[0]).front();
    const std::int32_t index = vocab.lookup(lowered);
    if (index == Vocabulary::kUnk || index == Vocabulary::kPad) continue;
    const bool is_exact = fields[0] == lowered;
    if (exact[index] || (filled[index] && !is_exact)) continue;
    std::copy(row.begin(), row.end(), values.begin() + index * dim);
    filled[index] = 1;
    exact[index] = is_exact;
  }

  LoadedEmbeddings<T> out;
  out.found = static_cast<std::size_t>(std::count(filled.begin(), filled.end(), 1));
  const std::size_t words = v > 2 ? v - 2 : 0;
  out.coverage = words == 0 ? 0.0 : static_cast<double>(out.found) / static_cast<double>(words);
  out.table.mode = mode;
  out.table.table =
      Tensor<T>::matrix(v, dim, std::move(values), mode == EmbeddingMode::kNonStatic);
  return out;
}

template <typename T>
LoadedEmbeddings<T> load_embeddings(const std::filesystem::path& path,
                                    const Vocabulary& vocab, std::size_t dim,
                                    std::uint64_t seed, EmbeddingMode mode) {
  return parse_embeddings<T>(read_file(path), vocab, dim, seed, mode, path.string());
}

template LoadedEmbeddings<float> parse_embeddings<float>(std::string_view, const Vocabulary&,
                                                         std::size_t, std::uint64_t,
                                                         EmbeddingMode, std::string_view);
template LoadedEmbeddings<double> parse_embeddings<double>(std::string_view,
                                                           const Vocabulary&, std::size_t,
                                                           std::uint64_t, EmbeddingMode,
                                                           std::string_view);
template LoadedEmbeddings<float> load_embeddings<float>(const std::filesystem::path&,
                                                        const Vocabulary&, std::size_t,
                                                        std::uint64_t, EmbeddingMode);
template LoadedEmbeddings<double> load_embeddings<double>(const std::filesystem::path&,
                                                          const Vocabulary&, std::size_t,
                                                          std::uint64_t, EmbeddingMode);

void TransferRecord::validate(std::optional<std::size_t> num_labels) const {
  if (logits.empty()) throw std::invalid_argument("record has no logits");
  for (double z : logits) {
    if (!std::isfinite(z)) throw std::invalid_argument("record has a non-finite logit");
  }
  if (num_labels && logits.size() != *num_labels) {
    throw std::invalid_argument("record has " + std::to_string(logits.size()) +
                                " logits, task expects " + std::to_string(*num_labels));
  }
  const std::size_t expected = argmax(logits);
  if (label != expected) {
    throw std::invalid_argument("label " + std::to_string(label) +
                                " is not the argmax of the logits (" +
                                std::to_string(expected) + ")");
  }
  if (gold && *gold >= logits.size()) {
    throw std::invalid_argument("gold label " + std::to_string(*gold) + " out of range");
  }
}

std::string serialize_transfer_record(const TransferRecord& r) {
  std::string out = "{\"text_a\":" + json(r.text_a).dump();
  out += ",\"text_b\":" + (r.text_b ? json(*r.text_b).dump() : std::string("null"));
  out += ",\"logits\":[";
  for (std::size_t i = 0; i < r.logits.size(); ++i) {
    if (i > 0) out += ",";
    out += format_double(r.logits[i]);
  }
  out += "],\"label\":" + std::to_string(r.label);
  out += ",\"provenance\":\"" + std::string(provenance_name(r.provenance)) + "\"";
  out += ",\"gold\":" + (r.gold ? std::to_string(*r.gold) : std::string("null"));
  out += "}";
  return out;
}

std::string serialize_transfer_set(std::span<const TransferRecord> records) {
  std::string out;
  for (const TransferRecord& r : records) {
    r.validate();
    out += serialize_transfer_record(r);
    out += "\n";
  }
  return out;
}

void write_transfer_set(std::span<const TransferRecord> records,
                        const std::filesystem::path& path) {
  write_file_atomic(path, serialize_transfer_set(records));
}

std::vector<TransferRecord> parse_transfer_set(std::string_view contents,
                                               std::optional<std::size_t> num_labels,
                                               std::string_view source) {
  static const std::set<std::string> kFields = {"text_a", "text_b", "logits",
                                                "label",  "provenance", "gold"};
  std::vector<TransferRecord> out;
  const auto lines = split_lines(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      fail(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) fail(source, line_no, "expected a JSON object");
    for (const auto& [key, _] : obj.items()) {
      if (!kFields.contains(key)) fail(source, line_no, "unknown field '" + key + "'");
    }
    for (const std::string& key : kFields) {
      if (!obj.contains(key)) fail(source, line_no, "missing field '" + key + "'");
    }
    TransferRecord r;
    if (!obj["text_a"].is_string()) fail(source, line_no, "text_a must be a string");
    r.text_a = obj["text_a"].get<std::string>();
    if (obj["text_b"].is_string()) {
      r.text_b = obj["text_b"].get<std::string>();
    } else if (!obj["text_b"].is_null()) {
      fail(source, line_no, "text_b must be a string or null");
    }
    if (!obj["logits"].is_array()) fail(source, line_no, "logits must be an array");
    for (const json& z : obj["logits"]) {
      if (!z.is_number()) fail(source, line_no, "logits must be numbers");
      r.logits.push_back(z.get<double>());
    }
    if (!obj["label"].is_number_unsigned()) {
      fail(source, line_no, "label must be a non-negative integer");
    }
    r.label = obj["label"].get<std::size_t>();
    if (!obj["provenance"].is_string()) fail(source, line_no, "provenance must be a string");
    try {
      r.provenance = parse_provenance(obj["provenance"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(source, line_no, e.what());
    }
    if (obj["gold"].is_number_unsigned()) {
      r.gold = obj["gold"].get<std::size_t>();
    } else if (!obj["gold"].is_null()) {
      fail(source, line_no, "gold must be a non-negative integer or null");
    }
    try {
      r.validate(num_labels);
    } catch (const std::exception& e) {
      fail(source, line_no, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TransferRecord> read_transfer_set(const std::filesystem::path& path,
                                              std::optional<std::size_t> num_labels) {
  return parse_transfer_set(read_file(path), num_labels, path.string());
}

}  // namespace distill
