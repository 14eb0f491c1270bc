# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Base Scenario that pins a model, its run defaults and the checks a report must pass"""
import abc
import logging

import numpy as np

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)


def build_check(name, value, threshold, passed):
    """One pass/fail line of a report"""
    return {'name': name, 'value': value, 'threshold': threshold, 'passed': bool(passed)}


class BaseScenario(metaclass=abc.ABCMeta):
    """Scenario classes shape an experiment run.

    `DEFAULTS` are the lowest-precedence configuration values; `EXPECTED_CASES` restricts the
    validation case of the model (None accepts every valid case); `GAP_THRESHOLD` bounds the sup-norm
    gap between analytic and empirical tau over the q grid inside J and `GAP_WINDOW`.
    """
    NAME = None
    DEFAULTS = {}
    EXPECTED_CASES = None
    GAP_THRESHOLD = None
    GAP_WINDOW = (0.0, 3.0)

    def __init__(self, config):
        self.config = config

    def gap_window(self, runner):  # pylint: disable=unused-argument
        """The q range on which the sup-norm gap is measured"""
        return self.GAP_WINDOW

    @abc.abstractmethod
    def sections(self, runner):
        """Scenario-specific report sections, computed from the runner state."""

    def extra_checks(self, sections):  # pylint: disable=unused-argument
        return []

    def checks(self, sup_gaps, sections):
        """Pass/fail lines for the report: the sup gap per order, then the scenario's own checks"""
        results = []
        if self.GAP_THRESHOLD is not None:
            for order, gap in sorted(sup_gaps.items()):
                results.append(build_check(
                    'sup_gap_m%d' % order, gap, self.GAP_THRESHOLD,
                    np.isfinite(gap) and gap <= self.GAP_THRESHOLD,
                ))
        results.extend(self.extra_checks(sections))
        return results
