# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Left-sided spectrum of the heavy-log family, where tau'(q) blows up as q decreases to 0"""
import numpy as np

from cascademf.analytic_spectrum import left_sided_check, tau_prime
from cascademf.cascade import evaluate_grid
from cascademf.scenarios.base_scenario import BaseScenario, build_check
from cascademf.weights import NON_CONSERVATIVE_A

PROBE_POINTS = (1e-1, 1e-2, 1e-4, 1e-8, 1e-14)
MARTINGALE_SIGMAS = 3.0


class LeftSidedScenario(BaseScenario):
    """Checks the left-sidedness probe and the Mandelbrot martingale of the non-conservative weights"""
    NAME = 'left-sided'
    DEFAULTS = {
        'model': 'heavy-log',
        'depth': 14,
        'levels': [6, 7, 8, 9, 10, 11],
        'sub_depth': 3,
        'replicas': 64,
    }
    EXPECTED_CASES = (NON_CONSERVATIVE_A,)

    def sections(self, runner):
        model = runner.model
        slope, threshold, passed = left_sided_check(model)
        totals = np.array([
            evaluate_grid(real, 'W', real.depth).values[-1].real for real in runner.realizations
        ])
        stderr = float(np.std(totals, ddof=1) / np.sqrt(totals.size)) if totals.size > 1 else np.nan
        return {
            'left_sided_probe': {'tau_prime': slope, 'threshold': threshold, 'passed': passed},
            'tau_prime_near_zero': [[q, tau_prime(model, q)] for q in PROBE_POINTS],
            'martingale': {'mean': float(totals.mean()), 'stderr': stderr},
        }

    def extra_checks(self, sections):
        probe = sections['left_sided_probe']
        martingale = sections['martingale']
        # E F_{W,n}(1) = 1 at every depth
        deviation = abs(martingale['mean'] - 1.0)
        allowed = MARTINGALE_SIGMAS * martingale['stderr']
        return [
            build_check('left_sided_probe', probe['tau_prime'], probe['threshold'], probe['passed']),
            build_check('martingale_mean', deviation, allowed, np.isfinite(allowed) and deviation <= allowed),
        ]
