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

import json

import pytest

import bilstm_distill as bd


def test_tokenize_keeps_mask():
    assert bd.tokenize("The [MASK] Sat") == ["the", "[MASK]", "sat"]


def test_loss_identities():
    assert bd.distill_loss([1.0, 2.0], [0.0, 0.0]) == 5.0
    z, t = [0.3, -1.2, 2.0], [1.0, 0.0, -1.0]
    assert bd.combined_loss(z, 2, t, alpha=0.0) == bd.distill_loss(z, t)
    assert bd.combined_loss(z, 2, t, alpha=1.0) == bd.cross_entropy(z, 2)
    with pytest.raises(ValueError):
        bd.distill_loss([1.0], [0.0, 0.0])


def test_parameter_count():
    model = bd.StudentModel(bd.ModelConfig(300, 150, 200, 2), [["a", "b"]], seed=1)
    assert model.count_parameters(False) == 601802
    assert model.count_parameters(True) == 601802 + 4 * 300


def test_predict_and_checkpoint(tmp_path):
    config = bd.ModelConfig(8, 4, 6, 3, pair=True)
    model = bd.StudentModel(config, [["a", "b", "c"]], seed=2)
    logits = model.predict_logits([("a b", "c"), ("b", "zzz [MASK]")])
    assert len(logits) == 2 and len(logits[0]) == 3
    path = str(tmp_path / "m.ckpt")
    model.save(path)
    again = bd.StudentModel.load(path)
    assert again.predict_logits([("a b", "c")])[0] == logits[0]
    with pytest.raises(ValueError):
        model.predict_logits(["single sentence"])


def test_transfer_round_trip_and_validation():
    records = [
        {"text_a": "x", "text_b": None, "logits": [0.1, 0.9], "label": 1,
         "provenance": "original", "gold": 1},
        {"text_a": "y", "text_b": "z", "logits": [2.0, -1.0], "label": 0,
         "provenance": "synthetic", "gold": None},
    ]
    text = bd.serialize_transfer_set(records)
    assert list(json.loads(text.splitlines()[0])) == [
        "text_a", "text_b", "logits", "label", "provenance", "gold"]
    assert bd.parse_transfer_set(text, 2) == records
    bad = text.replace('"label":0', '"label":1')
    with pytest.raises(ValueError, match="2"):
        bd.parse_transfer_set(bad, 2)


def test_augmentation_rates_and_determinism():
    train, _ = bd.synthetic_task(seed=4)
    a = bd.augment_stats(train, seed=9)
    b = bd.augment_stats(train, seed=9)
    assert a["corpus"] == b["corpus"]
    assert 0.08 <= a["mask_rate"] <= 0.12
    assert 0.08 <= a["pos_rate"] <= 0.12
    assert 0.22 <= a["ngram_rate"] <= 0.28


def test_pipeline_commands(tmp_path):
    base = {"seed": 5, "embedding-dim": 8, "hidden": 8, "fc": 16, "max-epochs": 2,
            "n-iter": 2}
    task = str(tmp_path / "task.tsv")
    bd.synth({**base, "output": task})
    bd.augment({**base, "input": task, "output": str(tmp_path / "aug.tsv")})
    bd.train({**base, "mode": "baseline", "train": task, "dev": task + ".dev",
              "output": str(tmp_path / "teacher.ckpt")})
    bd.label({**base, "input": str(tmp_path / "aug.tsv"),
              "teacher": str(tmp_path / "teacher.ckpt"),
              "output": str(tmp_path / "transfer.jsonl")})
    bd.train({**base, "train": str(tmp_path / "transfer.jsonl"), "dev": task + ".dev",
              "output": str(tmp_path / "student.ckpt")})
    report = json.loads(bd.eval({"checkpoint": str(tmp_path / "student.ckpt"),
                                 "input": task + ".dev"}))
    assert report["count"] == 500
    assert 0.0 <= report["accuracy"] <= 1.0
    out = bd.bench({"checkpoint": str(tmp_path / "student.ckpt"), "input": task + ".dev",
                    "bench-repetitions": 5})
    assert "parameters_without_embeddings=" in out
    with pytest.raises(ValueError, match="unknown configuration key"):
        bd.synth({"outptu": task})
