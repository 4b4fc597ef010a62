# Copyright 2026 The MQFL Authors.
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
"""Multimodal quantum federated learning: CKKS, PQC layers, FL runs."""

import json as _json

from . import _core
from ._core import (  # noqa: F401
    Ciphertext,
    ConfigError,
    Context,
    ContractViolation,
    InputError,
    IntegrityError,
    KeySet,
    MqflError,
    ParameterError,
    ParseError,
    ProtocolError,
    UndefinedResult,
    add,
    aggregate_encrypted,
    aggregate_plain,
    aggregation_weights,
    angular_errors,
    auc,
    bench_sweep,
    confusion_matrix,
    decrypt,
    deserialize_ciphertext,
    encrypt,
    estimate_period,
    fundamental_period,
    generate_keys,
    micro_macro_auc,
    multiply_plain,
    param_shift_grad,
    partition_dataset,
    quantum_layer,
    roc_curve,
    rotation,
    serialize_ciphertext,
)

__version__ = _core.__version__


def _text(config):
    return config if isinstance(config, str) else _json.dumps(config)


def load_config(path):
    with open(path) as f:
        return _json.load(f)


def normalize_config(config):
    """Fills defaults and validates; returns the full config dict."""
    return _json.loads(_core.normalize_config(_text(config)))


def run_experiment(config):
    """Runs one experiment in memory and returns the result dict."""
    return _json.loads(_core.run_experiment(_text(config)))


def simulate(config, out_dir, resume=False):
    """Same as `mqfl simulate`: writes artifacts under out_dir."""
    return _json.loads(_core.run_command("simulate", _text(config), str(out_dir), resume))

