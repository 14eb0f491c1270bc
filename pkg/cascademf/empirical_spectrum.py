# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Partition sums on realizations, empirical tau estimation, coarse spectra and mu_q sampling"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import brentq
from scipy.special import logsumexp

from cascademf.analytic_spectrum import SpectrumCurve, interval_J, tau
from cascademf.cascade import NodeAddress
from cascademf.exceptions import OutsideJError
from cascademf.oscillation import OscQuery, cylinder_lengths, cylinder_oscillations, osc, row_oscillations
from cascademf.utils import worker_count

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

LOG_RANGE_LIMIT = 600.0
DEFAULT_Q_MIN = -2.0
DEFAULT_Y_TRUNCATION = 6
DEFAULT_MU_DRAWS = 64
MU_Q_STREAM = 0xA11
BALL_TOLERANCE = 0.1


@dataclass(frozen=True)
class CylinderTable:
    """Osc^(m)(F, I^L_w) and |I^L_w| for the b^n cylinders of one level"""
    level: int
    m: int
    oscillations: np.ndarray
    lengths: np.ndarray

    @property
    def alive(self):
        return self.oscillations > 0

    def exponents(self):
        """e(w) = log Osc(I_w) / log |I_w|, NaN on cylinders with zero oscillation"""
        values = np.full(self.oscillations.size, np.nan)
        alive = self.alive
        values[alive] = np.log(self.oscillations[alive]) / np.log(self.lengths[alive])
        return values

    def log_theta(self, q, t):
        """log theta_n(q, t) with the 0^q = 0 convention"""
        alive = self.alive
        if not np.any(alive):
            return -np.inf
        terms = q * np.log(self.oscillations[alive]) - t * np.log(self.lengths[alive])
        return float(logsumexp(terms))

    def root(self, q):
        """The t with theta_n(q, t) = 1, None when every oscillation vanishes"""
        alive = self.alive
        if not np.any(alive):
            return None

        offsets = q * np.log(self.oscillations[alive])
        slopes = -np.log(self.lengths[alive])
        # For K terms the root lies in [min (-log K - a_k) / c_k, min -a_k / c_k]
        high = float(np.min(-offsets / slopes))
        low = float(np.min((-np.log(alive.sum()) - offsets) / slopes))
        if high - low <= 0:
            return high

        def log_theta(t):
            return logsumexp(offsets + t * slopes)

        # Equal terms put the root on the lower end of the bracket
        if log_theta(low) >= 0:
            return low
        if log_theta(high) <= 0:
            return high
        return float(brentq(log_theta, low, high, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))


@dataclass
class PartitionTable:
    """Roots t_n(q) of theta_n(q, .) = 1 for one realization, one row per level"""
    m: int
    levels: tuple
    q_grid: np.ndarray
    roots: np.ndarray
    replica: int = 0
    tables: dict = field(default_factory=dict, repr=False)
    skipped: list = field(default_factory=list)

    def theta(self, level, q, t):
        return float(np.exp(self.tables[level].log_theta(q, t)))


@dataclass
class CoarseSpectrum:
    """Histogram of per-cylinder exponents with D(h) = log(count) / -log(mean length)"""
    h: np.ndarray
    d_hat: np.ndarray
    counts: np.ndarray
    void_count: int
    epsilon: float
    mean_length: float

    def rows(self):
        return [[float(h), float(d), int(count)] for h, d, count in zip(self.h, self.d_hat, self.counts)]

    @property
    def modal_h(self):
        return float(self.h[np.argmax(self.counts)]) if self.counts.size else np.nan


@dataclass
class MuQSample:
    """mu_q weights of the cylinders at target depth, plus addresses drawn from them"""
    q: float
    tau_q: float
    target_depth: int
    y_trunc_depth: int
    weights: np.ndarray
    drawn: list
    additivity_residual: float
    underflow: bool
    base: int = 2

    def addresses(self):
        return [NodeAddress.from_index(index, self.target_depth, self.base) for index in range(self.weights.size)]

    def rows(self):
        return [[str(address), float(weight)] for address, weight in zip(self.addresses(), self.weights)]


@dataclass(frozen=True)
class BallTauEstimate:
    """Packing-based scale estimate log(sum Osc(B)^q) / log(2r) at one radius"""
    q: float
    r: float
    value: float
    balls: int


def cylinder_table(real, m, n, sub_depth):
    """Factored oscillations and lengths of the level-n cylinders of a realization"""
    return CylinderTable(
        level=n,
        m=m,
        oscillations=cylinder_oscillations(real, n, m, sub_depth),
        lengths=cylinder_lengths(real, n, sub_depth),
    )


def composed_cylinder_table(samples, n, m=1, base=2):
    """Oscillations of sampled values (e.g. G = F + f) over the image cylinders of level n"""
    block = (samples.x.size - 1) // base ** n
    if block < m:
        raise ValueError("Level %d leaves %d samples per cylinder, too few for m=%d" % (n, block + 1, m))

    starts = np.arange(base ** n) * block
    lengths = samples.x[starts + block] - samples.x[starts]
    rows = samples.y[starts[:, None] + np.arange(block + 1)[None, :]]

    if m == 1:
        oscillations = row_oscillations(rows, 1)
    else:
        oscillations = np.array([
            osc(samples.x[start:start + block + 1], row, OscQuery(m=m, a=samples.x[start], b=samples.x[start + block]))
            for start, row in zip(starts, rows)
        ])
    return CylinderTable(level=n, m=m, oscillations=oscillations, lengths=lengths)


def partition_theta(real, m, n, q, t, sub_depth):
    """theta_n(q, t) = sum_w Osc^(m)(F, I^L_w)^q |I^L_w|^-t, zero-oscillation cylinders excluded"""
    if n + sub_depth > real.depth:
        raise ValueError("n + sub_depth = %d exceeds depth %d" % (n + sub_depth, real.depth))

    table = cylinder_table(real, m, n, sub_depth)
    alive = table.alive
    if not np.any(alive):
        return 0.0

    log_oscillations = np.log(table.oscillations[alive])
    log_lengths = np.log(table.lengths[alive])
    spread = abs(q) * np.ptp(log_oscillations) + abs(t) * np.ptp(log_lengths)
    if spread <= LOG_RANGE_LIMIT:
        return float(np.sum(table.oscillations[alive] ** q * table.lengths[alive] ** (-t)))
    return float(np.exp(table.log_theta(q, t)))


def partition_table(tables, q_grid, m, replica=0, q_min=DEFAULT_Q_MIN):
    """PartitionTable of roots from prepared CylinderTables (a dict level -> table)

    Negative q below `q_min`, or on a level with vanishing oscillations, is skipped.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    levels = tuple(sorted(tables))
    roots = np.full((len(levels), q_grid.size), np.nan)
    skipped = []

    for row, level in enumerate(levels):
        table = tables[level]
        has_void = not np.all(table.alive)
        for column, q in enumerate(q_grid):
            if q < 0 and (q < q_min or has_void):
                skipped.append((level, float(q), 'negative q with vanishing oscillations or below q_min'))
                continue
            root = table.root(q)
            if root is None:
                skipped.append((level, float(q), 'all-zero partition'))
                continue
            roots[row, column] = root

    return PartitionTable(m=m, levels=levels, q_grid=q_grid, roots=roots, replica=replica,
                          tables=dict(tables), skipped=skipped)


def realization_partition_table(real, m, levels, q_grid, sub_depth, replica=0, q_min=DEFAULT_Q_MIN):
    """Per-level roots t_n(q) on one realization, with sub_depth fixed across levels"""
    tables = {n: cylinder_table(real, m, n, sub_depth) for n in levels}
    return partition_table(tables, q_grid, m, replica, q_min)


def sample_partition_table(samples, m, levels, q_grid, replica=0, base=2, q_min=DEFAULT_Q_MIN):
    """Per-level roots t_n(q) computed directly on sampled values such as G-samples"""
    tables = {n: composed_cylinder_table(samples, n, m, base) for n in levels}
    return partition_table(tables, q_grid, m, replica, q_min)


def empirical_tau(reals, m, q_grid, levels, sub_depth, q_min=DEFAULT_Q_MIN):
    """Empirical tau: per-level medians of t_n(q) across replicas, extrapolated linearly in 1/n"""
    if not reals:
        raise ValueError("At least one realization is needed")
    if max(levels) + sub_depth > min(real.depth for real in reals):
        raise ValueError("Levels up to %d with sub_depth %d exceed the realization depth" % (max(levels), sub_depth))

    def table_of(indexed):
        replica, real = indexed
        return realization_partition_table(real, m, levels, q_grid, sub_depth, replica, q_min)

    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        tables = list(executor.map(table_of, enumerate(reals)))
    return aggregate_partition_tables(tables)


def aggregate_partition_tables(tables):
    """Median over replicas per (n, q), then the 1/n -> 0 intercept of an OLS fit and its stderr"""
    q_grid = tables[0].q_grid
    levels = np.asarray(tables[0].levels)
    stacked = np.stack([table.roots for table in tables])

    with np.errstate(all='ignore'):
        medians = np.nanmedian(stacked, axis=0) if np.any(np.isfinite(stacked)) else stacked[0]

    estimates = np.full(q_grid.size, np.nan)
    errors = np.full(q_grid.size, np.nan)
    used = np.zeros(q_grid.size, dtype=int)
    notes = []

    for column in range(q_grid.size):
        finite = np.isfinite(medians[:, column])
        used[column] = int(finite.sum())
        if used[column] == 0:
            notes.append("q=%s: every level skipped" % q_grid[column])
            continue
        if used[column] == 1:
            estimates[column] = medians[finite, column][0]
            notes.append("q=%s: single usable level, no extrapolation" % q_grid[column])
            continue
        fit = stats.linregress(1.0 / levels[finite], medians[finite, column])
        estimates[column] = fit.intercept
        errors[column] = fit.intercept_stderr

    skipped = 0
    for table in tables:
        notes.extend("replica %d level %d q=%s: %s" % ((table.replica,) + skip) for skip in table.skipped)
        skipped += len(table.skipped)
    if skipped:
        LOGGER.warning("Skipped %d (replica, level, q) cells of the partition tables", skipped)

    slopes = _gradient(q_grid, estimates)
    with np.errstate(invalid='ignore'):
        in_j = slopes * q_grid - estimates >= -1e-12

    return SpectrumCurve(
        q=q_grid,
        tau=estimates,
        tau_prime=slopes,
        in_j=in_j,
        source='empirical',
        stderr=errors,
        levels_used=used,
        level_roots=medians,
        notes=notes,
    )


def _gradient(q_grid, values):
    if q_grid.size < 2:
        return np.full(q_grid.size, np.nan)
    return np.gradient(values, q_grid)


def coarse_spectrum(real, m, n, sub_depth, epsilon):
    """Counting spectrum of per-cylinder exponents, bins of width epsilon centred on multiples of epsilon"""
    if epsilon <= 0:
        raise ValueError("The bin width must be positive, got %s" % epsilon)

    table = cylinder_table(real, m, n, sub_depth)
    exponents = table.exponents()
    alive = np.isfinite(exponents)
    void_count = int(np.count_nonzero(~alive))

    mean_length = float(np.exp(np.mean(np.log(table.lengths))))
    bins = np.rint(exponents[alive] / epsilon).astype(np.int64)
    occupied, counts = np.unique(bins, return_counts=True)
    d_hat = np.log(counts) / -np.log(mean_length)

    if void_count:
        LOGGER.info("%d of %d cylinders at level %d have zero oscillation", void_count, exponents.size, n)

    return CoarseSpectrum(
        h=occupied * epsilon,
        d_hat=d_hat,
        counts=counts,
        void_count=void_count,
        epsilon=epsilon,
        mean_length=mean_length,
    )


def minimum_exponent_trend(reals, m, levels, sub_depth):
    """Median over replicas of min_w e(w) at each level"""
    trend = {}
    for n in levels:
        minima = []
        for real in reals:
            exponents = cylinder_table(real, m, n, sub_depth).exponents()
            if np.any(np.isfinite(exponents)):
                minima.append(np.nanmin(exponents))
        trend[n] = float(np.median(minima)) if minima else np.nan
    return trend


def _log_q_weights(real, level, q, tau_q):
    """log Q_q(w) = q log|Q_W(w)| - tau(q) log Q_L(w) for every w at `level`, -inf where Q_W(w) = 0"""
    values = np.zeros(1)
    with np.errstate(divide='ignore'):
        for j in range(level):
            step = q * np.log(np.abs(real.weights('W', j))) - tau_q * np.log(real.weights('L', j))
            step = np.where(np.abs(real.weights('W', j)) > 0, step, -np.inf)
            values = (values[:, None] + step).reshape(-1)
    return values


def _log_mu_weights(real, q, tau_q, target_depth, y_trunc_depth):
    """log (Q_q(w) Y_{q,s}(w)): the log-sum of Q_q over the descendants of w at depth target + s"""
    descendants = _log_q_weights(real, target_depth + y_trunc_depth, q, tau_q)
    return logsumexp(descendants.reshape(real.base ** target_depth, -1), axis=1)


def sample_mu_q(real, q, target_depth, y_trunc_depth=DEFAULT_Y_TRUNCATION, draws=DEFAULT_MU_DRAWS, seed=0,
                interval=None):
    """Normalized mu_q weights on the cylinders of `target_depth` and `draws` addresses sampled from them"""
    interval = interval or interval_J(real.model)
    if not interval.q_lower < q < interval.q_upper:
        raise OutsideJError("q = %s is not interior to J = [%s, %s]" % (q, interval.q_lower, interval.q_upper))
    if target_depth + y_trunc_depth > real.depth:
        raise ValueError("target_depth + y_trunc_depth = %d exceeds depth %d"
                         % (target_depth + y_trunc_depth, real.depth))

    tau_q = tau(real.model, q)
    log_weights = _log_mu_weights(real, q, tau_q, target_depth, y_trunc_depth)
    total = logsumexp(log_weights)
    weights = np.exp(log_weights - total)

    with np.errstate(divide='ignore'):
        alive = np.isfinite(_log_q_weights(real, target_depth, q, tau_q))
    underflow = bool(np.any(alive & (weights == 0)))
    if underflow:
        LOGGER.warning("mu_q weights underflow on %d live cylinders", np.count_nonzero(alive & (weights == 0)))

    residual = np.nan
    if target_depth + y_trunc_depth + 1 <= real.depth:
        refined = _log_mu_weights(real, q, tau_q, target_depth, y_trunc_depth + 1)
        residual = float(np.sum(np.abs(np.exp(log_weights - total) - np.exp(refined - total))))

    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, MU_Q_STREAM])))
    indices = generator.choice(weights.size, size=draws, p=weights / weights.sum())
    drawn = [NodeAddress.from_index(int(index), target_depth, real.base) for index in indices]

    return MuQSample(
        q=q,
        tau_q=tau_q,
        target_depth=target_depth,
        y_trunc_depth=y_trunc_depth,
        weights=weights,
        drawn=drawn,
        additivity_residual=residual,
        underflow=underflow,
        base=real.base,
    )


def mu_q_residual_curve(real, q, target_depth, trunc_depths, interval=None):
    """(s, parent-child additivity residual) for each truncation depth s"""
    interval = interval or interval_J(real.model)
    return [
        (s, sample_mu_q(real, q, target_depth, s, draws=1, interval=interval).additivity_residual)
        for s in trunc_depths
    ]


def address_points(samples, addresses):
    """Midpoints of the image cylinders I^L_w inside the composed sample range"""
    points = []
    for address in addresses:
        block = (samples.x.size - 1) // address.base ** address.level
        start = address.index * block
        points.append(0.5 * (samples.x[start] + samples.x[start + block]))
    return np.asarray(points)


def ball_tau(samples, q, r, m=1, reference=None):
    """Greedy packing of disjoint balls of radius r centred on samples, best over starting offsets

    With a grid-based `reference` value (e.g. t_n(q) at the matching level) a gap beyond BALL_TOLERANCE
    is logged as a warning.
    """
    if r <= 0:
        raise ValueError("The radius must be positive, got %s" % r)

    x = samples.x
    candidates = x[(x >= x[0] + r) & (x <= x[-1] - r)]
    if candidates.size == 0:
        raise ValueError("No ball of radius %s fits in [%s, %s]" % (r, x[0], x[-1]))

    best_sum, best_count = -np.inf, 0
    for start in candidates[candidates < candidates[0] + 2 * r]:
        centres, last = [], -np.inf
        for centre in candidates[candidates >= start]:
            if centre - r >= last:
                centres.append(centre)
                last = centre + r
        oscillations = np.array([
            osc(x, samples.y, OscQuery(m=m, a=centre - r, b=centre + r)) for centre in centres
        ])
        alive = oscillations > 0
        if not np.any(alive):
            continue
        total = float(logsumexp(q * np.log(oscillations[alive])))
        if total > best_sum:
            best_sum, best_count = total, len(centres)

    estimate = BallTauEstimate(q=q, r=r, value=best_sum / np.log(2 * r), balls=best_count)
    if reference is not None and not abs(estimate.value - reference) <= BALL_TOLERANCE:
        LOGGER.warning("Ball estimate %s at r=%s differs from the grid value %s at q=%s",
                       estimate.value, r, reference, q)
    return estimate
