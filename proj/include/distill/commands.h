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

#ifndef DISTILL_COMMANDS_H_
#define DISTILL_COMMANDS_H_

#include <ostream>

#include "distill/config.h"

// Implementations of the command-line subcommands. Each writes its outputs
// atomically, echoes the effective configuration next to its main output
// (`<output>.config`), reports to `out`, and throws on failure.
namespace distill {

// input: tagged corpus -> output: augmented corpus with provenance, plus
// `<output>.stats`.
void cmd_augment(const RunConfig& config, std::ostream& out);

// input: augmented corpus; teacher: checkpoint, or logits: transfer JSONL
// whose records are matched to examples by text -> output: transfer JSONL.
void cmd_label(const RunConfig& config, std::ostream& out);

// train + dev -> output: checkpoint, plus `<output>.history.csv`.
void cmd_train(const RunConfig& config, std::ostream& out);

// checkpoint + input -> one JSON line of metrics on `out` (and in output if
// given).
void cmd_eval(const RunConfig& config, std::ostream& out);

// checkpoint + input -> parameter counts and inference timing.
void cmd_bench(const RunConfig& config, std::ostream& out);

// output: 500-example train split of the synthetic token-pattern task as a
// tagged corpus; the 500-example dev split goes to `<output>.dev`.
void cmd_synth(const RunConfig& config, std::ostream& out);

}  // namespace distill

#endif  // DISTILL_COMMANDS_H_
