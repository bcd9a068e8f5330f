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

"""Incremental permutation feature importance on data streams."""

import json
import os

from ._driftwise import (
    IpfiEnsemble,
    Model,
    SamplerKind,
    SmoothingInit,
    agrawal_ground_truth,
    agrawal_oracle,
    alpha_to_window,
    batch_pfi,
    collision_probability,
    expected_pfi,
    generate,
    logistic_regression,
    marginal_probability,
    naive_bayes,
    normalized_error,
    python_model,
    stagger_oracle,
    static_bias,
    verify,
    window_to_alpha,
)
from ._driftwise import _config_json, _run_json

__all__ = [
    "IpfiEnsemble",
    "Model",
    "SamplerKind",
    "SmoothingInit",
    "agrawal_ground_truth",
    "agrawal_oracle",
    "alpha_to_window",
    "batch_pfi",
    "collision_probability",
    "expected_pfi",
    "generate",
    "load_config",
    "logistic_regression",
    "marginal_probability",
    "naive_bayes",
    "normalized_error",
    "python_model",
    "run",
    "stagger_oracle",
    "static_bias",
    "verify",
    "window_to_alpha",
]


def _as_dict(config):
    if isinstance(config, (str, os.PathLike)):
        with open(config, encoding="utf-8") as f:
            return json.load(f)
    return dict(config)


def load_config(config):
    """Returns the config with every default filled in.

    `config` is a dict or a path to a JSON file. Unknown keys raise
    ValueError.
    """
    return json.loads(_config_json(json.dumps(_as_dict(config))))


def run(config, experiment=None, seed=None, out=None):
    """Runs an experiment and returns the parsed summary.json."""
    data = _as_dict(config)
    if experiment is not None:
        data["experiment"] = experiment
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["out"] = os.fspath(out)
    return json.loads(_run_json(json.dumps(data)))

