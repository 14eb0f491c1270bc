# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Finite differences, m-th order oscillations and pointwise oscillation exponents"""
import logging
from dataclasses import dataclass
from math import sqrt

import numpy as np
from scipy.optimize import linprog
from scipy.special import comb

from cascademf.cascade import evaluate_subtree_grids, grid_values
from cascademf.exceptions import (
    InsufficientRadiiError,
    IntervalError,
    LengthUnderflowError,
)

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 2 ** 12
BRUTE_FORCE_LIMIT = 64
BRUTE_FORCE_CHUNK = 2 ** 22
LAG_RATIO = 0.5
RADIUS_RUNGS = 10
MIN_USABLE_RADII = 4
POLICIES = ('auto', 'exhaustive', 'geometric')


@dataclass(frozen=True)
class OscQuery:
    """Order m, interval [a, b] and lag policy of one oscillation evaluation"""
    m: int = 1
    a: float = 0.0
    b: float = 1.0
    policy: str = 'auto'

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("The order m must be at least 1, got %s" % self.m)
        if not self.a < self.b:
            raise ValueError("Empty interval [%s, %s]" % (self.a, self.b))
        if self.policy not in POLICIES:
            raise ValueError("'%s' is not a lag policy." % self.policy)


@dataclass
class ExponentEstimate:
    """Least-squares slope of log Osc(B(x, r)) against log r"""
    x: float
    m: int
    slope: float
    radii: tuple
    residual: float
    nonzero_count: int
    infinite: bool = False

    def to_row(self):
        return [self.x, self.m, self.slope, self.residual, self.nonzero_count]


def finite_difference(values, m, step):
    """m-fold iterated difference with lag `step` along the last axis"""
    values = np.asarray(values)
    if values.shape[-1] <= m * step:
        raise LengthUnderflowError(
            "%d samples cannot hold an order-%d difference with lag %d" % (values.shape[-1], m, step)
        )
    for _ in range(m):
        values = values[..., step:] - values[..., :-step]
    return values


def row_diameters(rows):
    """Diameter of the value set of every row of a 2-D array"""
    rows = np.atleast_2d(rows)
    diameters = np.empty(rows.shape[0])

    if np.iscomplexobj(rows):
        complex_rows = np.any(rows.imag != 0, axis=1)
    else:
        complex_rows = np.zeros(rows.shape[0], dtype=bool)

    real_part = rows.real
    diameters[~complex_rows] = real_part[~complex_rows].max(axis=1) - real_part[~complex_rows].min(axis=1)

    selected = np.flatnonzero(complex_rows)
    if selected.size and rows.shape[1] <= BRUTE_FORCE_LIMIT:
        chunk = max(1, BRUTE_FORCE_CHUNK // (rows.shape[1] ** 2))
        for start in range(0, selected.size, chunk):
            block = rows[selected[start:start + chunk]]
            gaps = np.abs(block[:, :, None] - block[:, None, :])
            diameters[selected[start:start + chunk]] = gaps.reshape(block.shape[0], -1).max(axis=1)
    else:
        for row_index in selected:
            diameters[row_index] = hull_diameter(rows[row_index])

    return diameters


def hull_diameter(values):
    """Diameter of a planar point set: monotone-chain hulls, then rotating calipers over antipodal pairs"""
    points = sorted(set(zip(np.real(values).tolist(), np.imag(values).tolist())))
    if len(points) < 2:
        return 0.0

    widest = max(
        (first[0] - second[0]) ** 2 + (first[1] - second[1]) ** 2
        for first, second in _antipodal_pairs(points)
    )
    return sqrt(widest)


def _orientation(p, q, r):
    """Positive if p-q-r are clockwise, negative if counter-clockwise, zero if collinear"""
    return (q[1] - p[1]) * (r[0] - p[0]) - (q[0] - p[0]) * (r[1] - p[1])


def _hulls(points):
    upper, lower = [], []
    for point in points:
        while len(upper) > 1 and _orientation(upper[-2], upper[-1], point) <= 0:
            upper.pop()
        while len(lower) > 1 and _orientation(lower[-2], lower[-1], point) >= 0:
            lower.pop()
        upper.append(point)
        lower.append(point)
    return upper, lower


def _antipodal_pairs(points):
    upper, lower = _hulls(points)
    i, j = 0, len(lower) - 1
    while i < len(upper) - 1 or j > 0:
        yield upper[i], lower[j]

        if i == len(upper) - 1:
            j -= 1
        elif j == 0:
            i += 1
        elif (upper[i + 1][1] - upper[i][1]) * (lower[j][0] - lower[j - 1][0]) > \
                (lower[j][1] - lower[j - 1][1]) * (upper[i + 1][0] - upper[i][0]):
            i += 1
        else:
            j -= 1
    yield upper[i], lower[j]


def admissible_lags(count, m, policy='auto'):
    """Grid lags s with m*s <= count - 1, exhaustive or on the geometric ladder"""
    largest = (count - 1) // m
    if largest < 1:
        return []
    if policy == 'exhaustive' or (policy == 'auto' and count <= EXHAUSTIVE_LIMIT):
        return list(range(1, largest + 1))

    lags = []
    lag = float(largest)
    while lag >= 1:
        if int(lag) not in lags:
            lags.append(int(lag))
        lag *= LAG_RATIO
    return lags


def row_oscillations(rows, m, policy='auto'):
    """Osc^(m) of every row of a 2-D array of values at uniformly spaced abscissae"""
    rows = np.atleast_2d(rows)
    if m == 1:
        return row_diameters(rows)

    best = np.zeros(rows.shape[0])
    for lag in admissible_lags(rows.shape[1], m, policy):
        best = np.maximum(best, np.abs(finite_difference(rows, m, lag)).max(axis=1))
    return best


def osc(abscissae, values, query):
    """Osc^(m) of the samples (abscissae, values) over the interval of `query`"""
    abscissae = np.asarray(abscissae, dtype=float)
    values = np.asarray(values)
    tolerance = 1e-12 * (abscissae[-1] - abscissae[0])

    if query.a < abscissae[0] - tolerance or query.b > abscissae[-1] + tolerance:
        raise IntervalError(
            "[%s, %s] is outside the sample range [%s, %s]" % (query.a, query.b, abscissae[0], abscissae[-1])
        )

    inside = (abscissae >= query.a - tolerance) & (abscissae <= query.b + tolerance)
    points, ordinates = abscissae[inside], values[inside]
    if ordinates.size < 2:
        return 0.0

    if query.m == 1:
        return float(row_diameters(ordinates[None, :])[0])
    if _is_uniform(points):
        return float(row_oscillations(ordinates[None, :], query.m, query.policy)[0])
    return _scattered_oscillation(points, ordinates, query.m)


def _is_uniform(points):
    spacing = np.diff(points)
    return bool(np.all(np.abs(spacing - spacing[0]) <= 1e-9 * spacing[0]))


def _scattered_oscillation(points, ordinates, m):
    """Geometric lag ladder with piecewise-linear interpolation between samples"""
    coefficients = np.array([(-1) ** (m - k) * comb(m, k, exact=True) for k in range(m + 1)])
    span = points[-1] - points[0]
    smallest = np.min(np.diff(points))
    best = 0.0

    lag = span / m
    while lag >= smallest:
        starts = points[points <= points[-1] - m * lag + 1e-12 * span]
        stencil = starts[:, None] + lag * np.arange(m + 1)[None, :]
        stencil = np.minimum(stencil, points[-1])
        real = np.interp(stencil, points, ordinates.real)
        imag = np.interp(stencil, points, np.imag(ordinates))
        differences = (real + 1j * imag) @ coefficients
        best = max(best, float(np.abs(differences).max()))
        lag *= LAG_RATIO

    return best


def cylinder_oscillations(real, level, m, sub_depth, indices=None):
    """|Q_W(w)| Z^(m)(w) for the cylinders w of `level` (all of them, or the given indices)

    Z^(m)(w) is the oscillation over [0, 1] of the subtree approximant F^[w]_{W,sub_depth}. Cylinders
    with Q_W(w) = 0 get 0.
    """
    if level + sub_depth > real.depth:
        raise ValueError("level + sub_depth = %d exceeds depth %d" % (level + sub_depth, real.depth))

    moduli = np.abs(real.products('W', level))
    if indices is None:
        grids = evaluate_subtree_grids(real, 'W', level, sub_depth)
    else:
        indices = np.asarray(indices)
        moduli = moduli[indices]
        levels = [weights[indices] for weights in real.batched_weights('W', level, sub_depth)]
        grids = grid_values(levels, indices.size, real.base, bool(real.model.is_conservative('W')))

    oscillations = np.zeros(moduli.size)
    alive = moduli > 0
    if np.any(alive):
        oscillations[alive] = moduli[alive] * row_oscillations(grids[alive], m)
    return oscillations


def cylinder_lengths(real, level, sub_depth):
    """|I^L_w| approximated by Q_L(w) Z_L(w), Z_L(w) the subtree total at sub_depth"""
    totals = evaluate_subtree_grids(real, 'L', level, sub_depth)[:, -1]
    return real.products('L', level) * totals.real


def osc_interval_factored(real, w, m, sub_depth):
    """Osc^(m) of F over I^L_w through the factorization |Q_W(w)| Z^(m)(w)"""
    return float(cylinder_oscillations(real, w.level, m, sub_depth, indices=[w.index])[0])


def osc_ball(samples, x, r, m=1):
    """Osc^(m) of composed samples over B(x, r) clipped to the sample range"""
    low = max(x - r, samples.x[0])
    high = min(x + r, samples.x[-1])
    inside = (samples.x >= low) & (samples.x <= high)
    if np.count_nonzero(inside) < m + 1:
        return 0.0
    return osc(samples.x[inside], samples.y[inside], OscQuery(m=m, a=samples.x[inside][0], b=samples.x[inside][-1]))


def default_radii(samples, rungs=RADIUS_RUNGS):
    """r_k = r_0 2^-k with r_0 a quarter of the sample range"""
    start = (samples.x[-1] - samples.x[0]) / 4.0
    return tuple(start * 2.0 ** (-k) for k in range(rungs))


def pointwise_exponent(samples, x, m=1, radii=None):
    """Slope of log Osc^(m)(B(x, r)) against log r over a geometric ladder of radii"""
    if not samples.x[0] < x < samples.x[-1]:
        raise IntervalError("x = %s is not interior to [%s, %s]" % (x, samples.x[0], samples.x[-1]))

    radii = tuple(radii) if radii is not None else default_radii(samples)
    if any(later >= earlier for earlier, later in zip(radii, radii[1:])):
        raise ValueError("Radii must be strictly decreasing")

    oscillations = np.array([osc_ball(samples, x, r, m) for r in radii])
    usable = oscillations > 0

    if np.count_nonzero(~usable) * 2 >= len(radii):
        return ExponentEstimate(x=x, m=m, slope=np.inf, radii=radii, residual=np.nan,
                                nonzero_count=int(usable.sum()), infinite=True)
    if np.count_nonzero(usable) < MIN_USABLE_RADII:
        raise InsufficientRadiiError("Only %d radii gave a nonzero oscillation" % usable.sum())

    log_radii = np.log(np.asarray(radii)[usable])
    log_oscillations = np.log(oscillations[usable])
    slope, intercept = np.polyfit(log_radii, log_oscillations, 1)
    fitted = slope * log_radii + intercept
    residual = float(np.sqrt(np.mean((log_oscillations - fitted) ** 2)))

    return ExponentEstimate(x=x, m=m, slope=float(slope), radii=radii, residual=residual,
                            nonzero_count=int(usable.sum()))


def exponent_stabilization(samples, x, orders=(1, 2, 3, 4), radii=None):
    """Pointwise exponents for several orders at one location"""
    return {m: pointwise_exponent(samples, x, m, radii) for m in orders}


def best_affine_deviation(abscissae, values):
    """min over affine P of max |f - P| on real samples, solved as a linear program"""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        if np.any(values.imag != 0):
            raise ValueError("The minimax affine fit is defined for real samples only")
        values = values.real
    abscissae = np.asarray(abscissae, dtype=float)

    ones = np.ones_like(abscissae)
    upper = np.column_stack([-ones, -abscissae, -ones])
    lower = np.column_stack([ones, abscissae, -ones])
    result = linprog(
        c=[0.0, 0.0, 1.0],
        A_ub=np.vstack([upper, lower]),
        b_ub=np.concatenate([-values, values]),
        bounds=[(None, None), (None, None), (0, None)],
        method='highs',
    )
    return float(result.fun)
