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

#ifndef DISTILL_SYNTHETIC_H_
#define DISTILL_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "distill/augmentation.h"

namespace distill {

// A two-class token-pattern task for desk-scale distillation experiments.
//
// Each sentence is a run of noise words ("w17", tagged NOUN/VERB/ADJ/ADV by
// a fixed per-word assignment) with between min_signals and max_signals
// signal words inserted at uniform positions. Signal words are "pos0".. and
// "neg0".., all tagged SIG. The label is the class of the last signal word
// in the sentence: 1 if it is a pos* word, 0 if neg*. A fraction
// `label_noise` of training labels is flipped; dev labels are clean.
struct SyntheticTaskConfig {
  std::size_t train_size = 500;
  std::size_t dev_size = 500;
  std::size_t noise_words = 300;
  std::size_t signal_words = 6;  // per class
  std::size_t min_length = 8;
  std::size_t max_length = 20;
  std::size_t min_signals = 1;
  std::size_t max_signals = 4;
  double label_noise = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticTask {
  std::vector<TaggedExample> train;
  std::vector<TaggedExample> dev;
};

SyntheticTask make_synthetic_task(const SyntheticTaskConfig& config);

// Label the generator's rule assigns to a token sequence (class of the last
// signal word; 0 when there is none).
std::size_t synthetic_rule_label(const std::vector<std::string>& tokens);

}  // namespace distill

#endif  // DISTILL_SYNTHETIC_H_
