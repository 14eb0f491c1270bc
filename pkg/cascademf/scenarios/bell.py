# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Bell-shaped spectrum of the conservative Beta(2,2)-split cascade"""
import logging

import numpy as np

from cascademf.analytic_spectrum import tau_prime
from cascademf.empirical_spectrum import address_points
from cascademf.exceptions import CascadeError
from cascademf.oscillation import pointwise_exponent
from cascademf.scenarios.base_scenario import BaseScenario, build_check
from cascademf.weights import CONSERVATIVE_B1

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

MU_Q_TOLERANCE = 0.1


def mu_q_targeting(runner, q):
    """Median pointwise exponent at addresses drawn from mu_q on the first replica, against tau'(q)"""
    samples = runner.composed(0)
    sample = runner.mu_q_sample(q)
    slopes = []
    for x in address_points(samples, sample.drawn):
        try:
            estimate = pointwise_exponent(samples, x)
        except CascadeError as error:
            LOGGER.debug("Skipping mu_q point %s: %s", x, error)
            continue
        if not estimate.infinite:
            slopes.append(estimate.slope)

    expected = tau_prime(runner.model, q)
    median = float(np.median(slopes)) if slopes else np.nan
    return {
        'q': q,
        'tau_prime': expected,
        'median_exponent': median,
        'points': len(slopes),
        'gap': abs(median - expected),
        'additivity_residual': sample.additivity_residual,
        'underflow': sample.underflow,
    }


class BellScenario(BaseScenario):
    """Random bell case: W0 ~ Beta(2, 2), W1 = 1 - W0, L uniform"""
    NAME = 'bell'
    DEFAULTS = {
        'model': 'beta-split',
        'depth': 12,
        'levels': [5, 6, 7, 8, 9],
        'sub_depth': 3,
        'replicas': 64,
        'mu_q': [0.5, 1.0, 2.0],
    }
    EXPECTED_CASES = (CONSERVATIVE_B1,)
    GAP_THRESHOLD = 0.05

    def sections(self, runner):
        return {'mu_q': [mu_q_targeting(runner, q) for q in self.config.mu_q]}

    def extra_checks(self, sections):
        return [
            build_check('mu_q_%s' % entry['q'], entry['gap'], MU_Q_TOLERANCE,
                        np.isfinite(entry['gap']) and entry['gap'] <= MU_Q_TOLERANCE)
            for entry in sections.get('mu_q', [])
        ]
