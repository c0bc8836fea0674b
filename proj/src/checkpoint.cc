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

#include "distill/checkpoint.h"

#include <bit>
#include <cstring>

#include "distill/errors.h"
#include "distill/file_util.h"

namespace distill {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  template <typename V>
  void put(V v) {
    char raw[sizeof(V)];
    std::memcpy(raw, &v, sizeof(V));
    out_.append(raw, sizeof(V));
  }
  void put_string(std::string_view s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void put_raw(const void* data, std::size_t n) {
    out_.append(static_cast<const char*>(data), n);
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename V>
  V get() {
    V v;
    std::memcpy(&v, take(sizeof(V)), sizeof(V));
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    return std::string(take(n), n);
  }
  const char* take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw FormatError("checkpoint: truncated file");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

template <typename T>
std::string serialize_checkpoint(const StudentModel<T>& model) {
  Writer w;
  w.put_raw(kCheckpointMagic.data(), kCheckpointMagic.size());
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint8_t>(sizeof(T));
  const ModelConfig& c = model.config();
  w.put<std::uint64_t>(c.embedding_dim);
  w.put<std::uint64_t>(c.hidden);
  w.put<std::uint64_t>(c.fc);
  w.put<std::uint64_t>(c.num_labels);
  w.put<std::uint8_t>(c.arity == Arity::kPair ? 1 : 0);
  w.put<std::uint8_t>(c.embedding_mode == EmbeddingMode::kStatic ? 1 : 0);
  const Vocabulary& vocab = model.vocab();
  w.put<std::uint64_t>(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    w.put_string(vocab.token(static_cast<std::int32_t>(i)));
  }
  const auto params = model.all_parameters();
  w.put<std::uint64_t>(params.size());
  for (const auto& p : params) {
    w.put_string(p.name);
    w.put<std::uint64_t>(p.tensor.size());
    w.put_raw(p.tensor.values().data(), p.tensor.size() * sizeof(T));
  }
  return w.take();
}

template <typename T>
StudentModel<T> deserialize_checkpoint(const std::string& bytes) {
  Reader r(bytes);
  if (std::string_view(r.take(kCheckpointMagic.size()), kCheckpointMagic.size()) !=
      kCheckpointMagic) {
    throw FormatError("checkpoint: bad magic string");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const auto width = r.get<std::uint8_t>();
  if (width != sizeof(T)) {
    throw FormatError("checkpoint: stored with " + std::to_string(8 * width) +
                      "-bit values, requested " + std::to_string(8 * sizeof(T)));
  }
  ModelConfig c;
  c.embedding_dim = r.get<std::uint64_t>();
  c.hidden = r.get<std::uint64_t>();
  c.fc = r.get<std::uint64_t>();
  c.num_labels = r.get<std::uint64_t>();
  c.arity = r.get<std::uint8_t>() ? Arity::kPair : Arity::kSingle;
  c.embedding_mode =
      r.get<std::uint8_t>() ? EmbeddingMode::kStatic : EmbeddingMode::kNonStatic;
  const auto vocab_size = r.get<std::uint64_t>();
  Vocabulary vocab;
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    const std::string token = r.get_string();
    if (i < 2) {
      if (token != vocab.token(static_cast<std::int32_t>(i))) {
        throw FormatError("checkpoint: reserved vocabulary entry " + std::to_string(i) +
                          " is '" + token + "'");
      }
      continue;
    }
    if (vocab.add(token) != static_cast<std::int32_t>(i)) {
      throw FormatError("checkpoint: duplicate vocabulary token '" + token + "'");
    }
  }
  StudentModel<T> model(c, std::move(vocab), 0);
  auto params = model.all_parameters();
  const auto count = r.get<std::uint64_t>();
  if (count != params.size()) {
    throw FormatError("checkpoint: expected " + std::to_string(params.size()) +
                      " parameter tensors, found " + std::to_string(count));
  }
  for (auto& p : params) {
    const std::string name = r.get_string();
    const auto n = r.get<std::uint64_t>();
    if (name != p.name || n != p.tensor.size()) {
      throw FormatError("checkpoint: parameter '" + name + "' with " + std::to_string(n) +
                        " values does not match '" + p.name + "' with " +
                        std::to_string(p.tensor.size()));
    }
    std::memcpy(p.tensor.mutable_values().data(), r.take(n * sizeof(T)), n * sizeof(T));
  }
  if (!r.at_end()) throw FormatError("checkpoint: trailing bytes");
  return model;
}

template <typename T>
void save_checkpoint(const StudentModel<T>& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(model));
}

template <typename T>
StudentModel<T> load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint<T>(read_file(path));
}

template std::string serialize_checkpoint(const StudentModel<float>&);
template std::string serialize_checkpoint(const StudentModel<double>&);
template StudentModel<float> deserialize_checkpoint<float>(const std::string&);
template StudentModel<double> deserialize_checkpoint<double>(const std::string&);
template void save_checkpoint(const StudentModel<float>&, const std::filesystem::path&);
template void save_checkpoint(const StudentModel<double>&, const std::filesystem::path&);
template StudentModel<float> load_checkpoint<float>(const std::filesystem::path&);
template StudentModel<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace distill
