# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Experiment scenarios, one module per scenario"""
from cascademf.scenarios.bell import BellScenario
from cascademf.scenarios.corollary import CorollaryScenario
from cascademf.scenarios.critical import CriticalScenario
from cascademf.scenarios.custom import CustomScenario
from cascademf.scenarios.left_sided import LeftSidedScenario
from cascademf.scenarios.monofractal import MonofractalScenario

SCENARIO_DEFINITIONS = {
    'bell': BellScenario,
    'bell-critical': CriticalScenario,
    'left-sided': LeftSidedScenario,
    'monofractal': MonofractalScenario,
    'corollary-cw': CorollaryScenario,
    'custom': CustomScenario,
}


def is_valid_scenario(scenario_name):
    """Determines whether the given scenario name is a supported scenario or not"""
    return scenario_name in SCENARIO_DEFINITIONS
