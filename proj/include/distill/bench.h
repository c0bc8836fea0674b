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

#ifndef DISTILL_BENCH_H_
#define DISTILL_BENCH_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "distill/model.h"

namespace distill {

struct BenchReport {
  std::size_t parameters_with_embeddings = 0;
  std::size_t parameters_without_embeddings = 0;
  std::size_t sentences = 0;
  std::size_t batch_size = 0;
  std::vector<double> seconds;  // one entry per repetition
  double median_seconds = 0.0;
  double sentences_per_second = 0.0;

  // key=value lines.
  std::string to_text() const;
};

double median(std::vector<double> values);

// Times forward passes over `examples` in batches of `batch_size`, without
// gradient recording and excluding input preparation. Repeats at least once.
template <typename T>
BenchReport bench_inference(const StudentModel<T>& model, std::span<const TokenExample> examples,
                            std::size_t batch_size, std::size_t repetitions);

}  // namespace distill

#endif  // DISTILL_BENCH_H_
