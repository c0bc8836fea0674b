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

#include "distill/experiment.h"

#include <string>
#include <vector>

#include "distill/data_io.h"

namespace distill {
namespace {

// Stream tags for derive_seed.
enum Stream : std::uint64_t { kTask = 1, kPool, kTeacher, kAugment, kStudent, kShuffle };

Vocabulary vocabulary_of(std::span<const TaggedExample> examples) {
  std::vector<std::vector<std::string>> sentences;
  for (const TaggedExample& ex : examples) {
    sentences.push_back(ex.first.tokens);
    if (ex.second) sentences.push_back(ex.second->tokens);
  }
  return Vocabulary::build(sentences);
}

std::vector<TrainingExample> encode_all(std::span<const TaggedExample> examples,
                                        const Vocabulary& vocab) {
  std::vector<TrainingExample> out;
  out.reserve(examples.size());
  for (const TaggedExample& ex : examples) out.push_back(encode_example(ex, vocab));
  return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::uint64_t seed) {
  SyntheticTaskConfig task_config = config.task;
  task_config.seed = derive_seed(seed, kTask);
  const SyntheticTask task = make_synthetic_task(task_config);

  // Teacher: the task's training set plus a clean extra pool.
  std::vector<TaggedExample> pool = task.train;
  if (config.teacher_pool > 0) {
    SyntheticTaskConfig pool_config = config.task;
    pool_config.seed = derive_seed(seed, kPool);
    pool_config.train_size = config.teacher_pool;
    pool_config.dev_size = 1;
    pool_config.label_noise = 0.0;
    for (TaggedExample& ex : make_synthetic_task(pool_config).train) {
      ex.id = "pool-" + ex.id;
      pool.push_back(std::move(ex));
    }
  }
  const Vocabulary teacher_vocab = vocabulary_of(pool);
  TeacherConfig teacher_config = config.teacher;
  teacher_config.init_seed = derive_seed(seed, kTeacher);
  teacher_config.train.seed = derive_seed(seed, kTeacher, kShuffle);
  const std::vector<TrainingExample> teacher_dev = encode_all(task.dev, teacher_vocab);
  const ReferenceTeacher teacher = train_reference_teacher(
      teacher_vocab, encode_all(pool, teacher_vocab), teacher_dev, teacher_config);

  ExperimentResult result;
  result.teacher_accuracy = evaluate(teacher.model(), teacher_dev).accuracy;

  TrainConfig train_config = config.train;
  train_config.seed = derive_seed(seed, kShuffle);

  // Baseline: gold labels of the original training set.
  {
    const Vocabulary vocab = vocabulary_of(task.train);
    train_config.mode = TrainMode::kBaseline;
    const TrainResult<float> r =
        train(StudentModel<float>(config.student, vocab, derive_seed(seed, kStudent)),
              encode_all(task.train, vocab), encode_all(task.dev, vocab), train_config);
    result.baseline_accuracy = r.best_dev_accuracy;
  }

  // Distilled: teacher logits on the augmented training set.
  {
    AugConfig aug = config.aug;
    aug.seed = derive_seed(seed, kAugment);
    const std::vector<TaggedExample> augmented = augment_corpus(task.train, aug);
    const std::vector<TransferRecord> records =
        label_corpus(augmented, teacher.model().vocab(), teacher.as_function());
    result.transfer_size = records.size();
    const Vocabulary vocab = vocabulary_of(augmented);
    std::vector<TrainingExample> data;
    data.reserve(records.size());
    for (const TransferRecord& r : records) data.push_back(encode_record(r, vocab));
    train_config.mode = TrainMode::kDistill;
    const TrainResult<float> r =
        train(StudentModel<float>(config.student, vocab, derive_seed(seed, kStudent)), data,
              encode_all(task.dev, vocab), train_config);
    result.distilled_accuracy = r.best_dev_accuracy;
  }
  return result;
}

}  // namespace distill
