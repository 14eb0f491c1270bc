# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Conservative Beta split: W0 ~ Beta(alpha, beta), W1 = 1 - W0"""
import numpy as np
from scipy import special, stats

from cascademf.exceptions import DivergentExpectationError, InvalidModelError
from cascademf.generators.base_generator import BaseGenerator


class BetaSplitGenerator(BaseGenerator):
    """Bell-shaped spectra come from this family with the default Beta(2, 2) split"""
    NAME = 'beta_split'
    CONSERVATIVE = True

    def __init__(self, alpha=2.0, beta=2.0, L=(0.5, 0.5)):  # pylint: disable=invalid-name
        super().__init__(L)
        if self.base != 2:
            raise InvalidModelError("The Beta split is binary, got %d L coordinates" % self.base)
        if alpha <= 0 or beta <= 0:
            raise InvalidModelError("Beta parameters must be positive, got (%s, %s)" % (alpha, beta))

        self.alpha = float(alpha)
        self.beta = float(beta)

    def params(self):
        return {'alpha': self.alpha, 'beta': self.beta}

    def draw_w(self, uniforms):
        first = stats.beta.ppf(uniforms[:, 0], self.alpha, self.beta)
        return np.stack([first, 1.0 - first], axis=1).astype(complex)

    def mean_w(self):
        total = self.alpha + self.beta
        return np.array([self.alpha / total, self.beta / total], dtype=complex)

    def diverges(self, q):
        return q <= -self.alpha or q <= -self.beta

    def coordinate_moments(self, q):
        if self.diverges(q):
            raise DivergentExpectationError("Beta moment of order %s is infinite" % q)

        norm = special.betaln(self.alpha, self.beta)
        first = np.exp(special.betaln(self.alpha + q, self.beta) - norm)
        second = np.exp(special.betaln(self.alpha, self.beta + q) - norm)
        tail = special.digamma(self.alpha + self.beta + q)

        moments = np.array([first, second])
        log_moments = np.array([
            first * (special.digamma(self.alpha + q) - tail),
            second * (special.digamma(self.beta + q) - tail),
        ])
        return moments, log_moments
