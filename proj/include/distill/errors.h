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

#ifndef DISTILL_ERRORS_H_
#define DISTILL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace distill {

// Shape or length mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// NaN or otherwise unusable numeric input.
class NumericError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Misuse of the computation graph (repeated backward, non-scalar loss, ...).
class GraphError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed file contents. Messages carry the path and line number.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration key or value.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace distill

#endif  // DISTILL_ERRORS_H_
