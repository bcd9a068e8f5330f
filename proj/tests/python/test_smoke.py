# Copyright 2026 The Driftwise Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import csv
import math
import os
import pathlib

import pytest

import driftwise

CONFIGS = pathlib.Path(
    os.environ.get("DRIFTWISE_SOURCE_DIR", pathlib.Path(__file__).parents[2])
) / "configs"


def test_ground_truth():
    truth = driftwise.agrawal_ground_truth()
    assert len(truth) == 9
    assert truth[2] == pytest.approx(40 / 117)
    assert truth[0] == pytest.approx(80 / 169)


def test_closed_forms():
    assert driftwise.static_bias(0.5, 1, 1.0) == 0.5
    assert driftwise.window_to_alpha(199) == pytest.approx(0.01)
    p = 0.25
    value = driftwise.collision_probability(driftwise.SamplerKind.GEOMETRIC, 10004, 4, 4)
    assert value == pytest.approx(p / (2 - p), abs=1e-12)
    total = sum(
        driftwise.marginal_probability(driftwise.SamplerKind.GEOMETRIC, 50, r, 4, 4)
        for r in range(50)
    )
    assert total == pytest.approx(1.0)


def test_ipfi_tracks_model_reliance():
    X, y, names = driftwise.generate("agrawal", n=6000, seed=3)
    assert names[0] == "salary"
    oracle = driftwise.agrawal_oracle()
    ensemble = driftwise.IpfiEnsemble(9, alpha=0.005, sampler=driftwise.SamplerKind.UNIFORM)
    for row, target in zip(X, y):
        ensemble.explain_one(oracle, row, target)
    reference = driftwise.expected_pfi(oracle, X[:2000], y[:2000])
    estimate = ensemble.estimate()
    assert estimate[0] == pytest.approx(reference[0], abs=0.08)
    assert estimate[8] == 0.0


def test_python_model_and_batch_pfi():
    X, y, _ = driftwise.generate("agrawal", n=300, seed=1)
    oracle = driftwise.agrawal_oracle()
    model = driftwise.python_model(9, oracle.predict)
    values = driftwise.batch_pfi(model, X, y, permutations=3, seed=2)
    assert values == driftwise.batch_pfi(oracle, X, y, permutations=3, seed=2)
    assert values[0] > 0.3 and values[2] > 0.2
    assert all(v == 0.0 for j, v in enumerate(values) if j not in (0, 2))
    assert driftwise.batch_pfi(model, X, y, 3, 2) == values


def test_learners_learn():
    X, y, _ = driftwise.generate("stagger", n=500, seed=4)
    nb = driftwise.naive_bayes("stagger")
    assert nb.predict(X[0]) == 0.5
    for row, target in zip(X, y):
        nb.learn_one(row, target)
    assert 0.0 <= nb.predict(X[0]) <= 1.0
    X, _, _ = driftwise.generate("agrawal", n=1, seed=4)
    assert math.isfinite(driftwise.logistic_regression().predict(X[0]))


def test_run_writes_outputs(tmp_path):
    config = driftwise.load_config(CONFIGS / "experiment_c.json")
    config.update(stream_length=3000, interval=500, realizations=2)
    config["drift"]["position"] = 1500
    summary = driftwise.run(config, seed=5, out=tmp_path)
    assert "normalized_error" in summary
    with open(tmp_path / "importance.csv", newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["t", "feature", "estimator", "realization", "value"]
    assert {r[2] for r in rows[1:]} == {"ipfi_uniform", "ipfi_geometric", "interval_pfi"}


def test_bad_config_raises():
    with pytest.raises(ValueError):
        driftwise.load_config({"alpah": 0.1})
    with pytest.raises(ValueError):
        driftwise.run({"alpha": 2.0})
