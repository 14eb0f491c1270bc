# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Base Generator that defines how a continuous (W, L) law is drawn and integrated"""
import abc

import numpy as np

from cascademf.exceptions import DivergentExpectationError, InvalidModelError


class BaseGenerator(metaclass=abc.ABCMeta):
    """Generator classes turn a fixed number of uniforms per node into one (W, L) draw.

    L is deterministic for every family in the catalogue, so only the W coordinates are random. Each
    family also knows the moments E(1{W_i != 0} |W_i|^q) and E(1{W_i != 0} |W_i|^q log|W_i|) in closed
    form, which is what keeps phi, Phi and tau exact and lets divergence be decided analytically.
    """
    NAME = None
    UNIFORMS_PER_NODE = 1

    # Structural metadata consumed by weights.validate
    CONSERVATIVE = False
    SUM_NOT_ONE_CERTIFIED = False
    TWO_NONZERO = True
    LEFT_SIDED = False
    MODULUS_BOUNDED_BELOW = True

    # (q, threshold) such that tau_prime(q) > threshold certifies a left-sided spectrum
    LEFT_SIDED_PROBE = None

    def __init__(self, L=(0.5, 0.5)):  # pylint: disable=invalid-name
        self.l_weights = np.asarray(L, dtype=float)

        if self.l_weights.ndim != 1 or self.l_weights.size < 2:
            raise InvalidModelError("L must hold at least two coordinates, got %s" % (L,))
        if np.any(self.l_weights <= 0) or np.any(self.l_weights >= 1):
            raise InvalidModelError("L coordinates must lie in (0, 1), got %s" % (L,))

    @property
    def base(self):
        """Branching number b"""
        return self.l_weights.size

    @abc.abstractmethod
    def params(self):
        """The family parameters, as they appear in a serialized model."""

    @abc.abstractmethod
    def draw_w(self, uniforms):
        """Map an (n, UNIFORMS_PER_NODE) array of uniforms to an (n, b) complex array of W draws."""

    @abc.abstractmethod
    def mean_w(self):
        """Exact E(W_i) for every coordinate."""

    @abc.abstractmethod
    def diverges(self, q):
        """True when E(1{W_i != 0} |W_i|^q) is infinite for some coordinate, None when unknown."""

    @abc.abstractmethod
    def coordinate_moments(self, q):
        """Return (M, D) with M_i = E(1{W_i != 0}|W_i|^q) and D_i = E(1{W_i != 0}|W_i|^q log|W_i|)."""

    def draw(self, uniforms):
        """One (W, L) pair per row of `uniforms`"""
        w_draws = self.draw_w(np.atleast_2d(uniforms))
        l_draws = np.broadcast_to(self.l_weights, w_draws.shape).copy()
        return w_draws, l_draws

    def moment_terms(self, q, t):
        """Return (log Phi, Phi_q / Phi, Phi_t / Phi) at (q, t)

        Phi(q, t) = sum_i M_i(q) L_i^-t with partial derivatives taken in q and t.
        """
        if self.diverges(q):
            raise DivergentExpectationError(
                "E(sum |W_i|^%s L_i^-t) diverges for the %s family" % (q, self.NAME)
            )
        moments, log_moments = self.coordinate_moments(q)
        scale = self.l_weights ** (-t)
        total = np.sum(moments * scale)

        return (
            float(np.log(total)),
            float(np.sum(log_moments * scale) / total),
            float(-np.sum(moments * scale * np.log(self.l_weights)) / total),
        )

    def to_dict(self):
        """Serialized `generators` block"""
        params = dict(self.params())
        params['L'] = self.l_weights.tolist()
        return {'family': self.NAME, 'params': params}
