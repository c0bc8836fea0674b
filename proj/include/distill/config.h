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

#ifndef DISTILL_CONFIG_H_
#define DISTILL_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "distill/augmentation.h"
#include "distill/data_io.h"
#include "distill/model.h"
#include "distill/training.h"

namespace distill {

// Environment variable naming a default configuration file.
inline constexpr const char* kConfigEnvVar = "DISTILL_CONFIG";

enum class ValueKind { kString, kInt, kDouble, kBool };

struct ConfigKey {
  std::string_view name;  // kebab-case; also the CLI flag name
  ValueKind kind;
  std::string_view default_value;
  std::string_view help;
};

// Flat key/value run configuration. Unknown keys and badly typed values are
// rejected with ConfigError.
class RunConfig {
 public:
  RunConfig();

  static std::span<const ConfigKey> keys();

  void set(std::string_view key, std::string_view value);
  // "key = value" lines; '#' starts a comment.
  void merge_text(std::string_view text, std::string_view source = "<config>");
  void merge_file(const std::filesystem::path& path);

  const std::string& get(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::size_t get_size(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::uint64_t seed() const;
  // Empty value means "not given".
  bool has(std::string_view key) const { return !get(key).empty(); }

  // Every key with its current value, sorted, one "key = value" per line.
  std::string dump() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

AugConfig aug_config(const RunConfig& config);
TrainConfig train_config(const RunConfig& config);
ModelConfig model_config(const RunConfig& config);
Task task_of(const RunConfig& config);

}  // namespace distill

#endif  // DISTILL_CONFIG_H_
