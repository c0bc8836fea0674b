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

#ifndef DISTILL_DATA_IO_H_
#define DISTILL_DATA_IO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distill/augmentation.h"
#include "distill/model.h"

namespace distill {

// Lowercases and splits on whitespace. The mask token passes through
// unchanged. Used for every text that reaches a model.
std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);

enum class Task { kSst2, kQqp, kMnli };

// Column layout and label set of a GLUE-style task file.
struct TaskSchema {
  Task task;
  std::string name;
  Arity arity;
  std::vector<std::string> label_names;  // index -> name

  std::size_t num_labels() const { return label_names.size(); }
  // Accepts a label name or its decimal index; nullopt if neither.
  std::optional<std::size_t> parse_label(std::string_view text) const;
};

const TaskSchema& task_schema(Task task);
// "sst2" | "qqp" | "mnli".
Task parse_task(std::string_view name);

enum class SplitName { kTrain, kDev, kTest };
SplitName parse_split(std::string_view name);

struct DatasetSplit {
  SplitName name = SplitName::kTrain;
  Task task = Task::kSst2;
  std::vector<TaggedExample> examples;
};

// Reads a GLUE TSV (columns located through the header row:
// sentence/label for SST-2, question1/question2/is_duplicate for QQP,
// sentence1/sentence2/gold_label for MNLI). Train and dev splits must carry
// labels. Words are tagged with `tagger` when given, else kUnknownTag.
// Throws FormatError naming the line on malformed rows.
DatasetSplit parse_dataset(std::string_view contents, Task task, SplitName split,
                           const PosLexicon* tagger = nullptr,
                           std::string_view source = "<memory>");
DatasetSplit read_dataset(const std::filesystem::path& path, Task task, SplitName split,
                          const PosLexicon* tagger = nullptr);
// Canonical layout of the task (see README). Labels are written as indices
// for SST-2 and QQP and as names for MNLI.
std::string serialize_dataset(const DatasetSplit& split);
void write_dataset(const DatasetSplit& split, const std::filesystem::path& path);

// Tagged corpus TSV: id, tokens, tags, [tokens_b, tags_b,] label or "-",
// [provenance]. A first row whose first field is "id" is a header.
std::vector<TaggedExample> parse_tagged_corpus(std::string_view contents,
                                               std::string_view source = "<memory>");
std::vector<TaggedExample> read_tagged_corpus(const std::filesystem::path& path);
std::string serialize_tagged_corpus(std::span<const TaggedExample> examples,
                                    bool with_provenance);
void write_tagged_corpus(std::span<const TaggedExample> examples,
                         const std::filesystem::path& path, bool with_provenance);

template <typename T>
struct LoadedEmbeddings {
  EmbeddingTable<T> table;
  // Fraction of non-reserved vocabulary words found in the file.
  double coverage = 0.0;
  std::size_t found = 0;
};

// Textual word2vec format: optional "count dim" header, then
// "word v1 ... vd" per line. Words missing from the file get
// uniform(-0.25, 0.25) rows drawn from `seed`; the padding row is zero.
// File words are matched exactly or, failing that, by their lowercase form.
template <typename T>
LoadedEmbeddings<T> load_embeddings(const std::filesystem::path& path,
                                    const Vocabulary& vocab, std::size_t dim,
                                    std::uint64_t seed,
                                    EmbeddingMode mode = EmbeddingMode::kNonStatic);
template <typename T>
LoadedEmbeddings<T> parse_embeddings(std::string_view contents, const Vocabulary& vocab,
                                     std::size_t dim, std::uint64_t seed,
                                     EmbeddingMode mode = EmbeddingMode::kNonStatic,
                                     std::string_view source = "<memory>");

// Interchange unit between teacher and student.
struct TransferRecord {
  std::string text_a;
  std::optional<std::string> text_b;
  std::vector<double> logits;
  std::size_t label = 0;
  Provenance provenance = Provenance::kOriginal;
  std::optional<std::size_t> gold;

  // Throws std::invalid_argument if label != argmax(logits), logits are not
  // finite, or (when given) the logit count differs from num_labels.
  void validate(std::optional<std::size_t> num_labels = std::nullopt) const;
  bool operator==(const TransferRecord&) const = default;
};

// One JSON object per line with the fields text_a, text_b, logits, label,
// provenance, gold, in that order. Logits carry 17 significant digits.
std::string serialize_transfer_record(const TransferRecord& record);
std::string serialize_transfer_set(std::span<const TransferRecord> records);
void write_transfer_set(std::span<const TransferRecord> records,
                        const std::filesystem::path& path);

// Validates every line; FormatError names the offending line. Blank input is
// an empty set.
std::vector<TransferRecord> parse_transfer_set(
    std::string_view contents, std::optional<std::size_t> num_labels = std::nullopt,
    std::string_view source = "<memory>");
std::vector<TransferRecord> read_transfer_set(
    const std::filesystem::path& path, std::optional<std::size_t> num_labels = std::nullopt);

}  // namespace distill

#endif  // DISTILL_DATA_IO_H_
