# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Critical case: the b=3 mixture whose modulus-one weights drive the minimum exponent to 0"""
import numpy as np

from cascademf.empirical_spectrum import minimum_exponent_trend
from cascademf.scenarios.base_scenario import BaseScenario, build_check
from cascademf.weights import CRITICAL_B2

TREND_LEVELS = (8, 10, 12)


class CriticalScenario(BaseScenario):
    """Reports the minimum per-cylinder exponent across depths, expected strictly decreasing"""
    NAME = 'bell-critical'
    DEFAULTS = {
        'model': 'critical',
        'depth': 14,
        'levels': [6, 7, 8, 9, 10, 11],
        'sub_depth': 2,
        'replicas': 16,
    }
    EXPECTED_CASES = (CRITICAL_B2,)

    def sections(self, runner):
        sub_depth = runner.config.depth - max(TREND_LEVELS)
        trend = minimum_exponent_trend(runner.realizations, 1, TREND_LEVELS, sub_depth)
        return {'minimum_exponent_trend': [[level, value] for level, value in sorted(trend.items())]}

    def extra_checks(self, sections):
        values = [value for _, value in sections['minimum_exponent_trend']]
        decreasing = bool(np.all(np.diff(values) < 0))
        return [build_check('minimum_exponent_decreasing', values, None, decreasing)]
