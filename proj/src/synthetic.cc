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

#include "distill/synthetic.h"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "distill/rng.h"

namespace distill {
namespace {

constexpr const char* kNoiseTags[] = {"NOUN", "VERB", "ADJ", "ADV"};

TaggedExample make_example(Rng& rng, const SyntheticTaskConfig& c, std::string id) {
  const std::size_t len = c.min_length + rng.uniform_int(c.max_length - c.min_length + 1);
  const std::size_t signals =
      std::min(len, c.min_signals + static_cast<std::size_t>(
                                        rng.uniform_int(c.max_signals - c.min_signals + 1)));
  TaggedExample ex;
  ex.id = std::move(id);
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t w = rng.uniform_int(c.noise_words);
    ex.first.tokens.push_back("w" + std::to_string(w));
    ex.first.tags.emplace_back(kNoiseTags[w % 4]);
  }
  // Distinct positions for the signal words.
  std::vector<std::size_t> positions(len);
  for (std::size_t i = 0; i < len; ++i) positions[i] = i;
  for (std::size_t i = 0; i < signals; ++i) {
    std::swap(positions[i], positions[i + rng.uniform_int(len - i)]);
    const bool positive = rng.uniform_int(2) == 1;
    const std::size_t s = rng.uniform_int(c.signal_words);
    ex.first.tokens[positions[i]] = (positive ? "pos" : "neg") + std::to_string(s);
    ex.first.tags[positions[i]] = "SIG";
  }
  ex.gold_label = synthetic_rule_label(ex.first.tokens);
  return ex;
}

}  // namespace

std::size_t synthetic_rule_label(const std::vector<std::string>& tokens) {
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (it->rfind("pos", 0) == 0) return 1;
    if (it->rfind("neg", 0) == 0) return 0;
  }
  return 0;
}

SyntheticTask make_synthetic_task(const SyntheticTaskConfig& c) {
  if (c.min_length == 0 || c.max_length < c.min_length || c.min_signals == 0 ||
      c.max_signals < c.min_signals || c.noise_words == 0 || c.signal_words == 0) {
    throw std::invalid_argument("inconsistent synthetic task configuration");
  }
  Rng rng(derive_seed(c.seed, 0x5157));
  SyntheticTask task;
  for (std::size_t i = 0; i < c.train_size; ++i) {
    TaggedExample ex = make_example(rng, c, "train-" + std::to_string(i));
    if (rng.uniform01() < c.label_noise) ex.gold_label = 1 - *ex.gold_label;
    task.train.push_back(std::move(ex));
  }
  for (std::size_t i = 0; i < c.dev_size; ++i) {
    task.dev.push_back(make_example(rng, c, "dev-" + std::to_string(i)));
  }
  return task;
}

}  // namespace distill
