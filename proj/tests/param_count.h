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

#ifndef DISTILL_TESTS_PARAM_COUNT_H_
#define DISTILL_TESTS_PARAM_COUNT_H_

#include <cstddef>

#include "distill/model.h"

namespace distill::testing {

// Closed form, written independently of the model code:
//   |V| d + 2 (4h d + 4h h + 4h) + (m h) fc + fc + fc k + k
// with m = 2 for single sentences and m = 8 after concatenate-compare.
inline std::size_t closed_form_parameters(const ModelConfig& c, std::size_t vocab_size) {
  const std::size_t d = c.embedding_dim, h = c.hidden, fc = c.fc, k = c.num_labels;
  const std::size_t m = c.arity == Arity::kPair ? 8 : 2;
  return vocab_size * d + 2 * (4 * h * d + 4 * h * h + 4 * h) + m * h * fc + fc + fc * k + k;
}

}  // namespace distill::testing

#endif  // DISTILL_TESTS_PARAM_COUNT_H_
