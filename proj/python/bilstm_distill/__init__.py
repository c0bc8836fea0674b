#
# Copyright 2026 The bilstm-distill Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""BiLSTM students distilled from teacher logits (C++ core)."""

from ._distill import (
    ConfigError,
    DimensionError,
    FormatError,
    ModelConfig,
    NumericError,
    StudentModel,
    augment,
    augment_stats,
    bench,
    combined_loss,
    cross_entropy,
    distill_loss,
    eval,
    label,
    parse_transfer_set,
    run_experiment,
    serialize_transfer_set,
    synth,
    synthetic_task,
    tokenize,
    train,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "FormatError",
    "ModelConfig",
    "NumericError",
    "StudentModel",
    "augment",
    "augment_stats",
    "bench",
    "combined_loss",
    "cross_entropy",
    "distill_loss",
    "eval",
    "label",
    "parse_transfer_set",
    "run_experiment",
    "serialize_transfer_set",
    "synth",
    "synthetic_task",
    "tokenize",
    "train",
]
