# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Analytic spectra: Phi, tau, tau', the interval J, linearized extensions and Legendre transforms"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp, xlogy

from cascademf.exceptions import DivergentExpectationError, NoBracketError, NoRootError

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

SCAN_LIMIT = 64.0
SCAN_GRID = np.concatenate([np.arange(0.01, 1.0, 0.01), np.arange(1.0, SCAN_LIMIT + 1e-9, 0.25)])
ROOT_XTOL = 1e-15
IN_J_TOLERANCE = 1e-12
BRACKET_STEPS = 64


@dataclass
class SpectrumCurve:
    """Sampled (q, tau(q), tau'(q)) with J membership"""
    q: np.ndarray
    tau: np.ndarray
    tau_prime: np.ndarray
    in_j: np.ndarray
    q_lower: float = -np.inf
    q_upper: float = np.inf
    source: str = 'analytic'
    stderr: Optional[np.ndarray] = None
    levels_used: Optional[np.ndarray] = None
    level_roots: Optional[np.ndarray] = None
    notes: list = field(default_factory=list)

    @property
    def linearized(self):
        """Grid points where the curve continues linearly beyond J"""
        return (self.q > self.q_upper) | (self.q < self.q_lower)

    def rows(self):
        return [
            [float(q), float(tau), float(tau_prime), bool(in_j)]
            for q, tau, tau_prime, in_j in zip(self.q, self.tau, self.tau_prime, self.in_j)
        ]


@dataclass
class LegendrePair:
    """tau*(h) on a grid of h, with the h-range where tau* >= 0"""
    h: np.ndarray
    tau_star: np.ndarray
    support: tuple

    def rows(self):
        return [[float(h), float(value)] for h, value in zip(self.h, self.tau_star)]


@dataclass(frozen=True)
class JInterval:
    """J = [q_lower, q_upper] with h_lower = tau'(q_upper) and h_upper = tau'(q_lower)"""
    q_lower: float
    q_upper: float
    h_lower: float
    h_upper: float
    residual_lower: float = 0.0
    residual_upper: float = 0.0
    lower_is_domain_edge: bool = False

    def __iter__(self):
        return iter((self.q_lower, self.q_upper, self.h_lower, self.h_upper))

    @property
    def upper_bounded(self):
        return np.isfinite(self.q_upper)

    @property
    def lower_bounded(self):
        return np.isfinite(self.q_lower)

    def to_dict(self):
        return {
            'q_lower': self.q_lower,
            'q_upper': self.q_upper,
            'h_lower': self.h_lower,
            'h_upper': self.h_upper,
            'residual_lower': self.residual_lower,
            'residual_upper': self.residual_upper,
            'lower_is_domain_edge': self.lower_is_domain_edge,
        }


def moment_terms(model, q, t):
    """(log Phi, Phi_q / Phi, Phi_t / Phi) at (q, t)"""
    if not model.is_atomic:
        return model.family.moment_terms(q, t)

    probabilities, w_values, l_values = model.atom_arrays
    moduli = np.abs(w_values)
    nonzero = moduli > 0
    log_w = np.log(moduli[nonzero])
    log_l = np.log(l_values[nonzero])
    log_p = np.log(np.broadcast_to(probabilities[:, None], moduli.shape)[nonzero])

    terms = log_p + q * log_w - t * log_l
    total = logsumexp(terms)
    share = np.exp(terms - total)
    return float(total), float(np.dot(share, log_w)), float(-np.dot(share, log_l))


def Phi(model, q, t):  # pylint: disable=invalid-name
    """E(sum_i 1{W_i != 0} |W_i|^q L_i^-t)"""
    return float(np.exp(moment_terms(model, q, t)[0]))


def tau(model, q):
    """The unique t with Phi(q, t) = 1"""
    def log_phi(t):
        return moment_terms(model, q, t)[0]

    try:
        low, high = _bracket(log_phi)
    except DivergentExpectationError as error:
        raise NoBracketError("Phi(%s, .) diverges: %s" % (q, error)) from error

    root = brentq(log_phi, low, high, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=500)

    value, _, slope = moment_terms(model, q, root)
    polished = root - value / slope
    if abs(log_phi(polished)) < abs(value):
        root = polished
    return float(root)


def tau_prime(model, q, tau_q=None):
    """-(dPhi/dq) / (dPhi/dt) at (q, tau(q))"""
    tau_q = tau(model, q) if tau_q is None else tau_q
    _, phi_q, phi_t = moment_terms(model, q, tau_q)
    return float(-phi_q / phi_t)


def dimension_gap(model, q):
    """g(q) = q tau'(q) - tau(q), the value tau*(tau'(q))"""
    tau_q = tau(model, q)
    if not model.is_atomic:
        if q == 0:
            return -tau_q
        return q * tau_prime(model, q, tau_q) - tau_q

    # With pi the normalized terms, g = (sum pi log(pi / p) + log Phi) / sum pi log L, free of cancellation
    probabilities, w_values, l_values = model.atom_arrays
    moduli = np.abs(w_values)
    nonzero = moduli > 0
    log_l = np.log(l_values[nonzero])
    log_p = np.log(np.broadcast_to(probabilities[:, None], moduli.shape)[nonzero])
    terms = log_p + q * np.log(moduli[nonzero]) - tau_q * log_l
    total = logsumexp(terms)
    share = np.exp(terms - total)

    numerator = np.sum(xlogy(share, share)) - np.dot(share, log_p) + total
    return float(numerator / np.dot(share, log_l))


def interval_J(model):  # pylint: disable=invalid-name
    """Roots of g(q) = q tau'(q) - tau(q) on each side of 0, or +-inf when g stays positive"""
    upper, residual_upper, _ = _scan_side(model, 1.0)
    lower, residual_lower, domain_edge = _scan_side(model, -1.0)

    h_lower = tau_prime(model, upper if np.isfinite(upper) else SCAN_LIMIT)
    h_upper = tau_prime(model, lower if np.isfinite(lower) else -SCAN_LIMIT)

    return JInterval(
        q_lower=lower,
        q_upper=upper,
        h_lower=h_lower,
        h_upper=h_upper,
        residual_lower=residual_lower,
        residual_upper=residual_upper,
        lower_is_domain_edge=domain_edge,
    )


def _scan_side(model, sign):
    """Scan g outward from 0 on one side; returns (root or +-inf, residual, stopped at domain edge)"""
    previous_q, previous_gap = 0.0, _safe_gap(model, 0.0)
    if previous_gap is None:
        return 0.0, 0.0, True

    history = []
    for magnitude in SCAN_GRID:
        q = sign * magnitude
        gap = _safe_gap(model, q)
        if gap is None:
            LOGGER.info("tau undefined beyond q=%s, J stops at the domain edge", previous_q)
            return previous_q, previous_gap, True
        if gap < -IN_J_TOLERANCE:
            if previous_gap <= 0:
                return previous_q, previous_gap, False
            root = brentq(lambda value: dimension_gap(model, value), previous_q, q, xtol=ROOT_XTOL)
            return float(root), float(dimension_gap(model, root)), False
        history.append(gap)
        previous_q, previous_gap = q, gap

    tail = np.array(history[-16:])
    if np.any(np.diff(tail) > IN_J_TOLERANCE):
        LOGGER.warning("g stays positive up to |q|=%s without decreasing toward 0", SCAN_LIMIT)
    return sign * np.inf, float(history[-1]), False


def _safe_gap(model, q):
    try:
        return dimension_gap(model, q)
    except NoBracketError:
        return None


def full_tau_m(model, q, interval=None):
    """tau on J, continued linearly as tau'(q_upper) q beyond q_upper and tau'(q_lower) q below q_lower"""
    interval = interval or interval_J(model)

    if interval.upper_bounded and q >= interval.q_upper:
        return interval.h_lower * q
    if interval.lower_bounded and q <= interval.q_lower:
        if interval.lower_is_domain_edge and q < interval.q_lower:
            return np.nan
        if interval.lower_is_domain_edge:
            return tau(model, q)
        return interval.h_upper * q
    return tau(model, q)


def spectrum_curve(model, q_grid, interval=None):
    """Analytic SpectrumCurve on `q_grid`; tau is NaN where Phi diverges"""
    q_grid = np.asarray(q_grid, dtype=float)
    interval = interval or interval_J(model)
    taus = np.full(q_grid.size, np.nan)
    slopes = np.full(q_grid.size, np.nan)
    in_j = np.zeros(q_grid.size, dtype=bool)

    for position, q in enumerate(q_grid):
        try:
            taus[position] = tau(model, q)
        except NoBracketError:
            continue
        slopes[position] = tau_prime(model, q, taus[position])
        in_j[position] = interval.q_lower <= q <= interval.q_upper

    return SpectrumCurve(
        q=q_grid,
        tau=taus,
        tau_prime=slopes,
        in_j=in_j,
        q_lower=interval.q_lower,
        q_upper=interval.q_upper,
        source='analytic',
    )


def full_spectrum_curve(model, q_grid, interval=None):
    """SpectrumCurve of full_tau_m: tau on J, linear continuation outside"""
    interval = interval or interval_J(model)
    curve = spectrum_curve(model, q_grid, interval)
    values = np.array([full_tau_m(model, q, interval) for q in curve.q])
    slopes = np.where(
        curve.q >= interval.q_upper, interval.h_lower,
        np.where(curve.q <= interval.q_lower, interval.h_upper, curve.tau_prime),
    )
    curve.tau = values
    curve.tau_prime = slopes
    return curve


def legendre(curve, h_grid):
    """Discrete inf over the curve's q grid of h q - tau(q)"""
    h_grid = np.asarray(h_grid, dtype=float)
    finite = np.isfinite(curve.tau)
    q_values, tau_values = curve.q[finite], curve.tau[finite]

    tau_star = np.min(h_grid[:, None] * q_values[None, :] - tau_values[None, :], axis=1)
    return LegendrePair(h=h_grid, tau_star=tau_star, support=_support(h_grid, tau_star))


def legendre_parametric(model, q_grid):
    """Exact pairs (tau'(q), q tau'(q) - tau(q)) along `q_grid`"""
    slopes, values = [], []
    for q in q_grid:
        try:
            tau_q = tau(model, q)
        except NoBracketError:
            continue
        slopes.append(tau_prime(model, q, tau_q))
        values.append(dimension_gap(model, q))

    order = np.argsort(slopes)
    h_values = np.asarray(slopes)[order]
    tau_star = np.asarray(values)[order]
    return LegendrePair(h=h_values, tau_star=tau_star, support=_support(h_values, tau_star))


def _support(h_values, tau_star):
    nonnegative = h_values[tau_star >= -IN_J_TOLERANCE]
    if nonnegative.size == 0:
        return (np.nan, np.nan)
    return (float(nonnegative.min()), float(nonnegative.max()))


def smooth_addend_root(model, m):
    """q_m >= 0 with tau(q_m) = q_m m - 1 (the last sign change of tau(q) - (qm - 1) on [0, 64])"""
    def gap(q):
        return tau(model, q) - (q * m - 1.0)

    previous_q, previous_gap = 0.0, gap(0.0)
    for q in SCAN_GRID:
        current = gap(q)
        if current < 0:
            if abs(previous_gap) <= IN_J_TOLERANCE:
                return previous_q
            return float(brentq(gap, previous_q, q, xtol=ROOT_XTOL))
        previous_q, previous_gap = q, current

    raise NoRootError("tau(q) - (%s q - 1) keeps its sign on [0, %s]" % (m, SCAN_LIMIT))


def predicted_tau_G(model, m, q, q_m=None):  # pylint: disable=invalid-name
    """tau_G(q) for G = F + f with f^(m) nonvanishing: q m - 1 below q_m, tau(q) from q_m on"""
    if q < 0:
        raise ValueError("The smooth-addend prediction holds for q >= 0, got %s" % q)

    tau_q = tau(model, q)
    if q_m is None:
        try:
            q_m = smooth_addend_root(model, m)
        except NoRootError:
            LOGGER.warning("No q_%d root on [0, %s], prediction degenerates to tau", m, SCAN_LIMIT)
            return tau_q
    if q < q_m:
        return q * m - 1.0
    return tau_q


def left_sided_check(model):
    """(tau'(q_probe), threshold, passed) for families that declare a left-sidedness probe"""
    if model.is_atomic or model.family.LEFT_SIDED_PROBE is None:
        return None
    probe, threshold = model.family.LEFT_SIDED_PROBE
    slope = tau_prime(model, probe)
    return slope, threshold, bool(slope > threshold)


def _bracket(log_phi):
    """Expand [low, high] until log Phi changes sign; log Phi is increasing in t"""
    low, high = -1.0, 1.0
    width = 1.0
    for _ in range(BRACKET_STEPS):
        if log_phi(low) <= 0:
            break
        high = low
        low -= width
        width *= 2.0
    else:
        raise NoBracketError("No lower bracket for Phi(q, t) = 1")

    width = 1.0
    for _ in range(BRACKET_STEPS):
        if log_phi(high) >= 0:
            return low, high
        low = high
        high += width
        width *= 2.0
    raise NoBracketError("No upper bracket for Phi(q, t) = 1")
