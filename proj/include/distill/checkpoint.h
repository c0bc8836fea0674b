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

#ifndef DISTILL_CHECKPOINT_H_
#define DISTILL_CHECKPOINT_H_

#include <filesystem>
#include <string>

#include "distill/model.h"

namespace distill {

// Binary model checkpoint: the magic string "DSTLBLSTM", a format version,
// the scalar width, the model configuration, the vocabulary and every
// parameter tensor by name. Values are stored as raw little-endian IEEE
// floats, so save -> load -> save reproduces the file byte for byte.
inline constexpr std::string_view kCheckpointMagic = "DSTLBLSTM";
inline constexpr std::uint32_t kCheckpointVersion = 1;

template <typename T>
std::string serialize_checkpoint(const StudentModel<T>& model);
template <typename T>
StudentModel<T> deserialize_checkpoint(const std::string& bytes);

// Writes through a temporary file that is renamed on success.
template <typename T>
void save_checkpoint(const StudentModel<T>& model, const std::filesystem::path& path);
template <typename T>
StudentModel<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace distill

#endif  // DISTILL_CHECKPOINT_H_
