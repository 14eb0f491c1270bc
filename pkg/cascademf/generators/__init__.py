# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Parametric generator families for continuous weight laws"""
from cascademf.generators.beta_split import BetaSplitGenerator
from cascademf.generators.heavy_log import HeavyLogGenerator
from cascademf.generators.uniform_phase import UniformPhaseGenerator

GENERATOR_DEFINITIONS = {
    'beta_split': BetaSplitGenerator,
    'uniform_phase': UniformPhaseGenerator,
    'heavy_log': HeavyLogGenerator,
}


def is_valid_family(family_name):
    """Determines whether the given family name is part of the catalogue"""
    return family_name in GENERATOR_DEFINITIONS


def build_generator(spec):
    """Instantiate a family from its `{"family": ..., "params": {...}}` description"""
    family_name = spec.get('family')
    if not is_valid_family(family_name):
        raise ValueError("'%s' is not a known generator family." % family_name)

    return GENERATOR_DEFINITIONS[family_name](**spec.get('params', {}))
