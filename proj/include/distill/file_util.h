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

#ifndef DISTILL_FILE_UTIL_H_
#define DISTILL_FILE_UTIL_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace distill {

// Entire file contents. Throws std::runtime_error if unreadable.
std::string read_file(const std::filesystem::path& path);

// Writes `contents` to `path` + ".tmp" and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace distill

#endif  // DISTILL_FILE_UTIL_H_
