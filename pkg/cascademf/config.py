# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Run configuration: one JSON document with a defaults block and per-scenario blocks"""
import json
import logging
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from cascademf.cascade import DEFAULT_NODE_BUDGET
from cascademf.empirical_spectrum import DEFAULT_Q_MIN
from cascademf.exceptions import ConfigError, InvalidModelError
from cascademf.scenarios import SCENARIO_DEFINITIONS
from cascademf.scenarios.corollary import ADDEND_DEFINITIONS
from cascademf.weights import WeightModel, preset_model

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

SCENARIO_NAMES = tuple(SCENARIO_DEFINITIONS)
ADDEND_NAMES = tuple(ADDEND_DEFINITIONS)
ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class RunConfig:
    """Effective parameters of one experiment run"""
    scenario: str = 'custom'
    model: object = 'binomial'
    depth: int = 12
    levels: tuple = (5, 6, 7, 8, 9)
    sub_depth: int = 3
    replicas: int = 64
    q_grid: tuple = tuple(np.round(np.arange(0.0, 3.0 + 1e-9, 0.25), 10))
    m: tuple = (1,)
    seed: int = 0
    out: str = 'runs'
    addend: str = 'exp'
    eps: float = 0.05
    mu_q: tuple = ()
    mu_draws: int = 64
    y_trunc_depth: int = 2
    node_budget: int = DEFAULT_NODE_BUDGET
    q_min: float = DEFAULT_Q_MIN
    extras: dict = field(default_factory=dict)

    def resolve_model(self):
        """The WeightModel named (preset) or described inline (dict or JSON text) by `model`"""
        if isinstance(self.model, WeightModel):
            return self.model
        if isinstance(self.model, dict):
            return WeightModel.from_dict(self.model)
        if isinstance(self.model, str) and self.model.lstrip().startswith('{'):
            return WeightModel.from_json(self.model)
        try:
            return preset_model(self.model)
        except InvalidModelError as error:
            raise ConfigError(str(error)) from error

    def validate(self):
        """Raise ConfigError on inconsistent parameters, return self otherwise"""
        if self.scenario not in SCENARIO_NAMES:
            raise ConfigError("'%s' is not a supported scenario." % self.scenario)
        if self.replicas < 1:
            raise ConfigError("replicas must be at least 1, got %s" % self.replicas)
        if not self.levels or min(self.levels) < 1:
            raise ConfigError("levels must be a non-empty list of positive integers, got %s" % (self.levels,))
        if self.depth < max(self.levels) + self.sub_depth:
            raise ConfigError("depth %d is below max(levels) + sub_depth = %d"
                              % (self.depth, max(self.levels) + self.sub_depth))
        if not self.q_grid or np.any(np.diff(self.q_grid) <= 0):
            raise ConfigError("q_grid must be non-empty and strictly increasing")
        if min(self.q_grid) < self.q_min:
            raise ConfigError("q_grid starts below q_min = %s" % self.q_min)
        if not self.m or not set(self.m) <= set(ORDERS):
            raise ConfigError("m must be a subset of %s, got %s" % (ORDERS, self.m))
        if self.addend not in ADDEND_NAMES:
            raise ConfigError("'%s' is not a known smooth addend." % self.addend)
        if self.eps <= 0:
            raise ConfigError("eps must be positive, got %s" % self.eps)
        if self.y_trunc_depth < 0 or self.y_trunc_depth >= self.depth:
            raise ConfigError("y_trunc_depth must lie in [0, depth), got %s" % self.y_trunc_depth)
        return self

    def to_dict(self):
        values = asdict(self)
        model = self.model
        values['model'] = model.to_dict() if isinstance(model, WeightModel) else model
        for key in ('levels', 'q_grid', 'm', 'mu_q'):
            values[key] = [value.item() if hasattr(value, 'item') else value for value in values[key]]
        return values


def expand_levels(value):
    """`[5, 9]`-style explicit lists pass through; `{"first": 5, "last": 9}` expands inclusively"""
    if isinstance(value, dict):
        return tuple(range(int(value['first']), int(value['last']) + 1))
    return tuple(int(level) for level in value)


def expand_q_grid(value):
    """Explicit lists pass through; `{"start", "stop", "step"}` expands with the stop included"""
    if isinstance(value, dict):
        start, stop, step = float(value['start']), float(value['stop']), float(value['step'])
        if step <= 0:
            raise ConfigError("q_grid step must be positive, got %s" % step)
        return tuple(float(q) for q in np.round(np.arange(start, stop + step / 2, step), 10))
    return tuple(float(q) for q in value)


_CONVERTERS = {
    'levels': expand_levels,
    'q_grid': expand_q_grid,
    'm': lambda value: tuple(int(order) for order in (value if isinstance(value, (list, tuple)) else [value])),
    'mu_q': lambda value: tuple(float(q) for q in value),
    'depth': int,
    'sub_depth': int,
    'replicas': int,
    'seed': int,
    'mu_draws': int,
    'y_trunc_depth': int,
    'node_budget': int,
    'eps': float,
    'q_min': float,
}


def build_config(values):
    """RunConfig from a flat mapping; unknown keys are kept in `extras`"""
    known = {name for name in RunConfig.__dataclass_fields__ if name != 'extras'}
    arguments, extras = {}, {}
    for key, value in values.items():
        if value is None:
            continue
        if key in known:
            converter = _CONVERTERS.get(key)
            try:
                arguments[key] = converter(value) if converter else value
            except (TypeError, ValueError, KeyError) as error:
                raise ConfigError("Invalid value for '%s': %s" % (key, error)) from error
        else:
            extras[key] = value
    if extras:
        LOGGER.info("Unrecognized configuration keys kept as extras: %s", sorted(extras))
    return RunConfig(extras=extras, **arguments)


def merge_config(document, scenario=None, overrides=None, scenario_defaults=None):
    """Effective values: scenario defaults < `defaults` block < scenario block < top-level keys < overrides"""
    document = document or {}
    scenario = (overrides or {}).get('scenario') or scenario or document.get('scenario') or 'custom'

    values = dict(scenario_defaults or {})
    values.update(document.get('defaults', {}))
    values.update(document.get(scenario, {}))
    values.update({
        key: value for key, value in document.items()
        if key != 'defaults' and key not in SCENARIO_NAMES
    })
    values.update({key: value for key, value in (overrides or {}).items() if value is not None})
    values['scenario'] = scenario
    return values


def load_config(path=None, scenario=None, overrides=None, scenario_defaults=None):
    """Read a JSON config document (optional) and return the validated RunConfig for `scenario`"""
    document = {}
    if path:
        try:
            with open(path, encoding='utf-8') as stream:
                document = json.load(stream)
        except (OSError, json.JSONDecodeError) as error:
            raise ConfigError("Unable to read config %s: %s" % (path, error)) from error

    if scenario_defaults is None:
        name = (overrides or {}).get('scenario') or scenario or document.get('scenario')
        scenario_defaults = SCENARIO_DEFINITIONS[name].DEFAULTS if name in SCENARIO_DEFINITIONS else {}

    values = merge_config(document, scenario, overrides, scenario_defaults)
    return build_config(values).validate()


def with_overrides(config, **changes):
    """A copy of `config` with some fields replaced, validated again"""
    return replace(config, **changes).validate()
