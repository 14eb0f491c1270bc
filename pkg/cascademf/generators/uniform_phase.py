# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Complex conservative split with a uniform random phase"""
import numpy as np

from cascademf.exceptions import InvalidModelError
from cascademf.generators.base_generator import BaseGenerator


class UniformPhaseGenerator(BaseGenerator):
    """W0 = 1/2 + rho e^{i theta}, W1 = 1/2 - rho e^{i theta} with theta uniform on [0, 2 pi)

    Both moduli stay in [1/2 - rho, 1/2 + rho], so every moment is finite. Moments are integrals of a
    periodic analytic function of theta and use the periodic trapezoid rule.
    """
    NAME = 'uniform_phase'
    CONSERVATIVE = True
    QUADRATURE_NODES = 1024

    def __init__(self, rho=0.3, L=(0.5, 0.5)):  # pylint: disable=invalid-name
        super().__init__(L)
        if self.base != 2:
            raise InvalidModelError("The uniform phase split is binary, got %d L coordinates" % self.base)
        if not 0 < rho < 0.5:
            raise InvalidModelError("rho must lie in (0, 1/2), got %s" % rho)

        self.rho = float(rho)
        theta = 2.0 * np.pi * np.arange(self.QUADRATURE_NODES) / self.QUADRATURE_NODES
        self._log_modulus = np.log(np.abs(0.5 + self.rho * np.exp(1j * theta)))

    def params(self):
        return {'rho': self.rho}

    def draw_w(self, uniforms):
        phase = self.rho * np.exp(2j * np.pi * uniforms[:, 0])
        return np.stack([0.5 + phase, 0.5 - phase], axis=1)

    def mean_w(self):
        return np.array([0.5, 0.5], dtype=complex)

    def diverges(self, q):
        return False

    def coordinate_moments(self, q):
        powers = np.exp(q * self._log_modulus)
        moment = np.mean(powers)
        log_moment = np.mean(powers * self._log_modulus)

        # theta -> theta + pi swaps the two coordinates
        return np.array([moment, moment]), np.array([log_moment, log_moment])
