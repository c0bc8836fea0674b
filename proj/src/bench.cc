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

#include "distill/bench.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>

#include "distill/tensor.h"

namespace distill {

std::string BenchReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "parameters_with_embeddings=%zu\n"
                "parameters_without_embeddings=%zu\n"
                "sentences=%zu\n"
                "batch_size=%zu\n"
                "repetitions=%zu\n"
                "median_seconds=%.6f\n"
                "sentences_per_second=%.1f\n",
                parameters_with_embeddings, parameters_without_embeddings, sentences,
                batch_size, seconds.size(), median_seconds, sentences_per_second);
  return buf;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

template <typename T>
BenchReport bench_inference(const StudentModel<T>& model, std::span<const TokenExample> examples,
                            std::size_t batch_size, std::size_t repetitions) {
  if (batch_size == 0) throw std::invalid_argument("bench batch size must be positive");
  if (examples.empty()) throw std::invalid_argument("bench needs at least one example");
  BenchReport report;
  report.parameters_with_embeddings = model.count_parameters(true);
  report.parameters_without_embeddings = model.count_parameters(false);
  report.sentences = examples.size();
  report.batch_size = batch_size;

  std::vector<std::vector<const TokenExample*>> batches;
  for (std::size_t start = 0; start < examples.size(); start += batch_size) {
    auto& b = batches.emplace_back();
    for (std::size_t i = start; i < std::min(examples.size(), start + batch_size); ++i) {
      b.push_back(&examples[i]);
    }
  }
  NoGradGuard no_grad;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, repetitions); ++rep) {
    const auto begin = std::chrono::steady_clock::now();
    for (const auto& b : batches) {
      const Tensor<T> logits = model.forward_batch(b);
      (void)logits;
    }
    const auto end = std::chrono::steady_clock::now();
    report.seconds.push_back(std::chrono::duration<double>(end - begin).count());
  }
  report.median_seconds = median(report.seconds);
  report.sentences_per_second =
      report.median_seconds > 0.0 ? static_cast<double>(examples.size()) / report.median_seconds
                                  : 0.0;
  return report;
}

template BenchReport bench_inference(const StudentModel<float>&, std::span<const TokenExample>,
                                     std::size_t, std::size_t);
template BenchReport bench_inference(const StudentModel<double>&, std::span<const TokenExample>,
                                     std::size_t, std::size_t);

}  // namespace distill
