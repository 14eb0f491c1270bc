# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Monofractal collapse: W = ((1+i)/2, (1-i)/2), L uniform, a single exponent 1/2"""
import logging

import numpy as np

from cascademf.empirical_spectrum import coarse_spectrum
from cascademf.exceptions import CascadeError
from cascademf.oscillation import pointwise_exponent
from cascademf.scenarios.base_scenario import BaseScenario, build_check
from cascademf.weights import CONSERVATIVE_B1

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

HOLDER_EXPONENT = 0.5
POINTWISE_TOLERANCE = 0.05
BIN_TOLERANCE = 0.1
POINTWISE_COUNT = 32


class MonofractalScenario(BaseScenario):
    """The coarse spectrum must collapse to one bin and every pointwise exponent must sit at 1/2"""
    NAME = 'monofractal'
    DEFAULTS = {
        'model': 'monofractal',
        'depth': 12,
        'levels': [5, 6, 7, 8, 9],
        'sub_depth': 3,
        'replicas': 64,
    }
    EXPECTED_CASES = (CONSERVATIVE_B1,)
    GAP_THRESHOLD = 0.05

    def sections(self, runner):
        config = runner.config
        coarse = coarse_spectrum(runner.realizations[0], 1, max(config.levels), config.sub_depth, config.eps)

        samples = runner.composed(0)
        generator = np.random.Generator(np.random.Philox(np.random.SeedSequence([config.seed, POINTWISE_COUNT])))
        points = np.sort(generator.uniform(0.1, 0.9, POINTWISE_COUNT))
        slopes = []
        dropped = 0
        for x in points:
            try:
                slope = pointwise_exponent(samples, float(x)).slope
            except CascadeError as error:
                LOGGER.debug("No exponent at %s: %s", x, error)
                slope = np.nan
            if not np.isfinite(slope):
                dropped += 1
                continue
            slopes.append(slope)
        if dropped:
            LOGGER.warning("Dropped %d of %d pointwise exponents", dropped, POINTWISE_COUNT)
        deviations = np.abs(np.asarray(slopes) - HOLDER_EXPONENT)

        return {
            'coarse_spectrum': {
                'bins': coarse.rows(),
                'void_count': coarse.void_count,
                'modal_h': coarse.modal_h,
            },
            'pointwise': {
                'points': len(slopes),
                'dropped': dropped,
                'median_exponent': float(np.median(slopes)) if slopes else np.nan,
                'max_deviation': float(deviations.max()) if slopes else np.nan,
            },
        }

    def extra_checks(self, sections):
        coarse = sections['coarse_spectrum']
        single_bin = len(coarse['bins']) == 1 and abs(coarse['modal_h'] - HOLDER_EXPONENT) <= BIN_TOLERANCE
        pointwise = sections['pointwise']
        gap = pointwise['max_deviation']
        return [
            build_check('coarse_single_bin', coarse['modal_h'], BIN_TOLERANCE, single_bin),
            build_check('pointwise_exponent', gap, POINTWISE_TOLERANCE,
                        pointwise['dropped'] == 0 and np.isfinite(gap) and gap <= POINTWISE_TOLERANCE),
        ]
