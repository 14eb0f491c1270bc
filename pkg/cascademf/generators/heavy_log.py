# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Heavy-log family: |W0| = exp(-V) with V of density v_min / v^2 on [v_min, inf)"""
import numpy as np
from scipy import special

from cascademf.exceptions import DivergentExpectationError, InvalidModelError
from cascademf.generators.base_generator import BaseGenerator


class HeavyLogGenerator(BaseGenerator):
    """E log|W0| = -inf while every non-negative moment of |W0| is finite, so tau'(0) is infinite

    W1 is deterministic, tuned so that E(W0 + W1) = 1, and bounded away from 0. With
    E_n the generalized exponential integral:
        E(W0^q) = E_2(q v_min)
        E(W0^q log W0) = -v_min E_1(q v_min)
    Draws with V beyond the double range underflow to W0 = 0.
    """
    NAME = 'heavy_log'
    CONSERVATIVE = False
    SUM_NOT_ONE_CERTIFIED = True
    LEFT_SIDED = True
    LEFT_SIDED_PROBE = (1e-14, 20.0)

    def __init__(self, v_min=1.0, L=(0.5, 0.5)):  # pylint: disable=invalid-name
        super().__init__(L)
        if self.base != 2:
            raise InvalidModelError("The heavy-log family is binary, got %d L coordinates" % self.base)
        if v_min <= 0:
            raise InvalidModelError("v_min must be positive, got %s" % v_min)

        self.v_min = float(v_min)
        self.w_rest = 1.0 - special.expn(2, self.v_min)

    def params(self):
        return {'v_min': self.v_min}

    def draw_w(self, uniforms):
        tail = self.v_min / (1.0 - uniforms[:, 0])
        first = np.exp(-tail)
        return np.stack([first, np.full_like(first, self.w_rest)], axis=1).astype(complex)

    def mean_w(self):
        return np.array([special.expn(2, self.v_min), self.w_rest], dtype=complex)

    def diverges(self, q):
        return q < 0

    def coordinate_moments(self, q):
        if self.diverges(q):
            raise DivergentExpectationError("E(W0^%s) is infinite for the heavy-log family" % q)

        first = special.expn(2, q * self.v_min)
        with np.errstate(divide='ignore'):
            first_log = -self.v_min * special.expn(1, q * self.v_min)
        second = self.w_rest ** q

        return np.array([first, second]), np.array([first_log, second * np.log(self.w_rest)])
