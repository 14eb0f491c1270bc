# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""b-adic coding space, weight-tree sampling and exact grid evaluation of the cascade approximants"""
import csv
import logging
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional

import numpy as np

from cascademf.exceptions import DepthOverflowError, NonMonotoneError
from cascademf.utils import worker_count

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 2 ** 24
BINARY_MAGIC = b'CMFR'
HEAVY_TAIL_SHARE = 0.5


@dataclass(frozen=True)
class NodeAddress:
    """A word w over the alphabet {0, ..., b-1}; the empty word is the root"""
    digits: tuple = ()
    base: int = 2

    def __post_init__(self):
        if any(not 0 <= digit < self.base for digit in self.digits):
            raise ValueError("Digits %s out of range for base %d" % (self.digits, self.base))

    @classmethod
    def parse(cls, text, base=2):
        return cls(tuple(int(char) for char in text), base)

    @classmethod
    def from_index(cls, index, level, base=2):
        """The address of the index-th cylinder (lexicographic order) at `level`"""
        digits = []
        for _ in range(level):
            index, digit = divmod(index, base)
            digits.append(digit)
        return cls(tuple(reversed(digits)), base)

    @property
    def level(self):
        return len(self.digits)

    @property
    def index(self):
        return reduce(lambda value, digit: value * self.base + digit, self.digits, 0)

    @property
    def t(self):
        """Left endpoint t_w of the cylinder I_w"""
        return self.index / self.base ** self.level

    def prefix(self, k):
        """w|_k"""
        return NodeAddress(self.digits[:k], self.base)

    def child(self, digit):
        return NodeAddress(self.digits + (digit,), self.base)

    def __str__(self):
        return ''.join(str(digit) for digit in self.digits)


def neighbor(addr, direction):
    """Base-b increment (+1) or decrement (-1) at fixed length, None past either boundary"""
    if direction == 0:
        return addr
    target = addr.index + direction
    if target < 0 or target >= addr.base ** addr.level:
        return None
    return NodeAddress.from_index(target, addr.level, addr.base)


def level_uniforms(master_seed, level, count, width):
    """Uniforms for the first `count` nodes of `level`

    Philox is a counter-based generator keyed here by (master_seed, level); row j is read at counter
    position j * width, so it only depends on (master_seed, level, j).
    """
    bit_generator = np.random.Philox(np.random.SeedSequence([master_seed, level]))
    return np.random.Generator(bit_generator).random((count, width))


def replica_seed(master_seed, replica):
    """Independent 64-bit seed of one replica"""
    return int(np.random.SeedSequence([master_seed, replica]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class CascadeRealization:
    """One sampled weight tree to depth N

    `draws[k]` holds the draws of the b^k nodes at level k in lexicographic order: an array of atom
    indices for atom models, a (W, L) pair of (b^k, b) arrays for generator families.
    """
    model: object
    depth: int
    master_seed: int
    draws: tuple
    root: NodeAddress = NodeAddress()
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def base(self):
        return self.model.base

    def weights(self, side, level):
        """(b^level, b) array of U(v) for the nodes v at `level`"""
        draw = self.draws[level]
        if self.model.is_atomic:
            _, w_values, l_values = self.model.atom_arrays
            return (w_values if side == 'W' else l_values)[draw]
        return draw[0] if side == 'W' else draw[1]

    def products(self, side, level):
        """Q_U(w) for every w at `level` (lexicographic order)"""
        key = (side, level)
        if key not in self._cache:
            if level == 0:
                values = np.ones(1, dtype=complex if side == 'W' else float)
            else:
                parent = self.products(side, level - 1)
                values = (parent[:, None] * self.weights(side, level - 1)).reshape(-1)
            self._cache[key] = values
        return self._cache[key]

    def subtree(self, address):
        """The realization of the subtree rooted at `address`, from which F^[w] is built"""
        start = address.index
        sliced = []
        for offset, level in enumerate(range(address.level, self.depth)):
            width = self.base ** offset
            rows = slice(start * width, (start + 1) * width)
            draw = self.draws[level]
            sliced.append(draw[rows] if self.model.is_atomic else (draw[0][rows], draw[1][rows]))

        return CascadeRealization(
            model=self.model,
            depth=self.depth - address.level,
            master_seed=self.master_seed,
            draws=tuple(sliced),
            root=NodeAddress(self.root.digits + address.digits, self.base),
        )

    def batched_weights(self, side, level, sub_depth):
        """Weights below every node of `level`, as arrays of shape (b^level, b^j, b) for j < sub_depth"""
        count = self.base ** level
        return [
            self.weights(side, level + j).reshape(count, self.base ** j, self.base)
            for j in range(sub_depth)
        ]


@dataclass(frozen=True)
class GridFunction:
    """F_{U,n} at the b-adic points t_w of level n, plus the value at 1"""
    level: int
    base: int
    values: np.ndarray

    @property
    def abscissae(self):
        return np.arange(self.base ** self.level + 1) / self.base ** self.level

    @property
    def increments(self):
        return np.diff(self.values)


@dataclass(frozen=True)
class ComposedSamples:
    """F = F_W o F_L^-1 represented on the image grid by (F_L(t_w), F_W(t_w))"""
    x: np.ndarray
    y: np.ndarray
    level: int

    def interpolate(self, points):
        """Piecewise-linear values of F at arbitrary points of [x_0, x_last]"""
        real = np.interp(points, self.x, self.y.real)
        imag = np.interp(points, self.x, self.y.imag)
        return real + 1j * imag

    def with_addend(self, function):
        """Samples of G = F + function on the same abscissae"""
        return ComposedSamples(x=self.x, y=self.y + function(self.x), level=self.level)


@dataclass
class MomentReport:
    """Monte Carlo moments and Laplace transform of Z^(m) = Osc^(m)(F_W, [0, 1])"""
    q: float
    m: int
    depth: int
    replicas: int
    estimate: float
    stderr: float
    variance: float
    laplace: list
    heavy_tail: bool
    samples: np.ndarray = field(repr=False, default=None)

    def to_dict(self):
        return {
            'q': self.q,
            'm': self.m,
            'depth': self.depth,
            'replicas': self.replicas,
            'estimate': self.estimate,
            'stderr': self.stderr,
            'variance': self.variance,
            'laplace': [[t, value] for t, value in self.laplace],
            'heavy_tail': self.heavy_tail,
        }


def sample_tree(model, depth, master_seed, node_budget=DEFAULT_NODE_BUDGET):
    """Draw the weight tree of `model` down to `depth` from a node-addressed seed"""
    if depth < 1:
        raise ValueError("depth must be at least 1, got %s" % depth)
    if model.base ** depth > node_budget:
        raise DepthOverflowError(
            "b^N = %d^%d exceeds the node budget %d" % (model.base, depth, node_budget)
        )

    draws = []
    for level in range(depth):
        uniforms = level_uniforms(master_seed, level, model.base ** level, model.uniforms_per_node)
        if model.is_atomic:
            draws.append(model.atom_indices(uniforms))
        else:
            draws.append(model.draw(uniforms))

    LOGGER.debug("Sampled %d levels of '%s' with seed %d", depth, model.label, master_seed)
    return CascadeRealization(model=model, depth=depth, master_seed=master_seed, draws=tuple(draws))


def grid_values(levels, batch, base, conservative):
    """Values of the depth-s approximants of `batch` trees at the b^s + 1 grid points

    levels[j] has shape (batch, b^j, b). F(t_w) is accumulated level by level: at level j every point
    receives the mass of the siblings to the left of its ancestor, Q(w|_{j-1} i) times the subtree
    total (identically 1 for conservative weights). The n terms of each point are added in level order
    with Kahan compensation.
    """
    depth = len(levels)
    dtype = np.result_type(*levels) if levels else float
    size = base ** depth

    products = [np.ones((batch, 1), dtype=dtype)]
    for j in range(depth):
        products.append((products[j][:, :, None] * levels[j]).reshape(batch, -1))

    totals = [None] * (depth + 1)
    totals[depth] = np.ones((batch, size), dtype=dtype)
    for j in reversed(range(depth)):
        if conservative:
            totals[j] = np.ones((batch, base ** j), dtype=dtype)
        else:
            totals[j] = (levels[j] * totals[j + 1].reshape(batch, base ** j, base)).sum(axis=2)

    values = np.zeros((batch, size + 1), dtype=dtype)
    running = np.zeros((batch, size), dtype=dtype)
    compensation = np.zeros((batch, size), dtype=dtype)
    for j in range(1, depth + 1):
        mass = (products[j] * totals[j]).reshape(batch, base ** (j - 1), base)
        before = np.zeros_like(mass)
        before[:, :, 1:] = np.cumsum(mass[:, :, :-1], axis=2)
        term = np.repeat(before.reshape(batch, base ** j), base ** (depth - j), axis=1)

        corrected = term - compensation
        updated = running + corrected
        compensation = (updated - running) - corrected
        running = updated

    values[:, :-1] = running
    values[:, -1] = totals[0][:, 0]
    return values


def evaluate_grid(real, side, n):
    """F_{U,n} at the b-adic points of level n"""
    if n > real.depth:
        raise ValueError("Level %d exceeds the realization depth %d" % (n, real.depth))

    levels = [real.weights(side, j)[None, :, :].reshape(1, real.base ** j, real.base) for j in range(n)]
    values = grid_values(levels, 1, real.base, bool(real.model.is_conservative(side)))[0]
    return GridFunction(level=n, base=real.base, values=values)


def evaluate_subtree_grids(real, side, level, sub_depth):
    """F^[w]_{U,sub_depth} for every w at `level`, as a (b^level, b^sub_depth + 1) array"""
    levels = real.batched_weights(side, level, sub_depth)
    return grid_values(levels, real.base ** level, real.base, bool(real.model.is_conservative(side)))


def compose(fw, fl):
    """Pair F_{L,n}(t_w) with F_{W,n}(t_w)"""
    if fw.level != fl.level or fw.base != fl.base:
        raise ValueError("Grid functions must share level and base")

    abscissae = np.asarray(fl.values)
    if np.iscomplexobj(abscissae):
        if np.any(abscissae.imag != 0):
            raise NonMonotoneError("F_L must be real valued")
        abscissae = abscissae.real
    if np.any(np.diff(abscissae) <= 0):
        raise NonMonotoneError("F_L is not strictly increasing at level %d" % fl.level)

    return ComposedSamples(x=abscissae, y=np.asarray(fw.values, dtype=complex), level=fw.level)


def composed_samples(real, n):
    """Shortcut for compose(evaluate_grid(real, W, n), evaluate_grid(real, L, n))"""
    return compose(evaluate_grid(real, 'W', n), evaluate_grid(real, 'L', n))


def check_self_similarity(real, n, subtrees=None):
    """max |F_n(t) - F_n(i/b) - W_i F^[i]_{n-1}(bt - i)| over digits i and grid points t"""
    if n < 2:
        raise ValueError("Self-similarity needs n >= 2, got %d" % n)

    grid = evaluate_grid(real, 'W', n).values
    root_weights = real.weights('W', 0)[0]
    block = real.base ** (n - 1)
    residual = 0.0

    for digit in range(real.base):
        subtree = subtrees[digit] if subtrees else real.subtree(NodeAddress((digit,), real.base))
        local = evaluate_grid(subtree, 'W', n - 1).values
        segment = grid[digit * block:(digit + 1) * block + 1]
        gap = np.abs(segment - segment[0] - root_weights[digit] * local)
        residual = max(residual, float(gap.max()))

    return residual


def estimate_moments(model, m, q, t_list, replicas, depth, seed, node_budget=DEFAULT_NODE_BUDGET):
    """Moments E((Z^(m))^q) and Laplace transform of Z^(m) over independent replicas"""
    from cascademf.oscillation import OscQuery, osc

    if replicas < 2:
        raise ValueError("At least two replicas are needed, got %d" % replicas)

    def oscillation_of_replica(replica):
        real = sample_tree(model, depth, replica_seed(seed, replica), node_budget)
        grid = evaluate_grid(real, 'W', depth)
        return osc(grid.abscissae, grid.values, OscQuery(m=m))

    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        samples = np.array(list(executor.map(oscillation_of_replica, range(replicas))))

    with np.errstate(divide='ignore'):
        powers = np.where(samples > 0, samples ** q, 0.0)
    variance = float(np.var(powers, ddof=1))
    laplace = [(float(t), float(np.mean(np.exp(-t * samples)))) for t in t_list]

    heavy_tail = bool(powers.sum() > 0 and powers.max() > HEAVY_TAIL_SHARE * powers.sum())
    if heavy_tail:
        LOGGER.warning("Top replica carries more than half of the q=%s moment sum", q)

    return MomentReport(
        q=q,
        m=m,
        depth=depth,
        replicas=replicas,
        estimate=float(powers.mean()),
        stderr=float(np.sqrt(variance / replicas)),
        variance=variance,
        laplace=laplace,
        heavy_tail=heavy_tail,
        samples=samples,
    )


def martingale_check(model, depth, replicas, seed):
    """Mean and standard error of F_{W,depth}(1) over replicas"""
    totals = np.array([
        evaluate_grid(sample_tree(model, depth, replica_seed(seed, replica)), 'W', depth).values[-1]
        for replica in range(replicas)
    ])
    stderr = np.sqrt(np.var(totals.real, ddof=1) + np.var(totals.imag, ddof=1)) / np.sqrt(replicas)
    return complex(totals.mean()), float(stderr)


def export_binary(real, stream):
    """Header (magic, b, N, seed), then each node's W (complex128) and L (float64) in depth-first order"""
    stream.write(BINARY_MAGIC)
    stream.write(struct.pack('<IIQ', real.base, real.depth, real.master_seed))

    w_levels = [real.weights('W', level).astype(np.complex128) for level in range(real.depth)]
    l_levels = [real.weights('L', level).astype(np.float64) for level in range(real.depth)]

    pending = [(0, 0)]
    while pending:
        level, index = pending.pop()
        stream.write(w_levels[level][index].tobytes())
        stream.write(l_levels[level][index].tobytes())
        if level + 1 < real.depth:
            first_child = index * real.base
            pending.extend((level + 1, first_child + digit) for digit in reversed(range(real.base)))


def export_grid_csv(grid, stream):
    """Write `t,re,im` rows"""
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(['t', 're', 'im'])
    values = np.asarray(grid.values, dtype=complex)
    for t, value in zip(grid.abscissae, values):
        writer.writerow([repr(float(t)), repr(float(value.real)), repr(float(value.imag))])


def node_draw(real, address) -> Optional[tuple]:
    """The (W, L) couple carried by node `address`, None below the realization depth"""
    if address.level >= real.depth:
        return None
    return real.weights('W', address.level)[address.index], real.weights('L', address.level)[address.index]
