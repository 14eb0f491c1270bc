# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Weight models (W, L): definition, serialization, phi and the case taxonomy"""
import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from cascademf.exceptions import DivergentExpectationError, InvalidModelError, UndecidableError
from cascademf.generators import build_generator, is_valid_family

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

STRUCTURAL_TOLERANCE = 1e-10
PROBABILITY_TOLERANCE = 1e-12
WITNESS_GRID = (2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0)
WITNESS_BISECTION_STEPS = 60
PHI_CHECK_POINTS = (0.0, 1.0, 2.0, 10.0, 50.0, 100.0)
MONTE_CARLO_SAMPLES = 100000

NON_CONSERVATIVE_A = 'NonConservativeA'
CONSERVATIVE_B1 = 'ConservativeB1'
CRITICAL_B2 = 'CriticalB2'
REJECTED = 'Rejected'


@dataclass(frozen=True)
class Atom:
    """One deterministic (W, L) couple carrying probability p"""
    p: float
    w: tuple
    l: tuple  # noqa: E741

    def to_dict(self):
        return {
            'p': self.p,
            'W': [[value.real, value.imag] for value in self.w],
            'L': list(self.l),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            p=float(data['p']),
            w=tuple(complex(*_as_pair(value)) for value in data['W']),
            l=tuple(float(value) for value in data['L']),
        )


@dataclass(frozen=True)
class WeightModel:
    """The joint law of (W, L): either a finite mixture of atoms or one catalogue family"""
    base: int
    atoms: tuple = ()
    generators: Optional[dict] = None
    label: str = ''

    def __post_init__(self):
        if self.base < 2:
            raise InvalidModelError("The branching number must be at least 2, got %s" % self.base)
        if bool(self.atoms) == bool(self.generators):
            raise InvalidModelError("A model needs either atoms or a generator family, not both")
        for atom in self.atoms:
            if len(atom.w) != self.base or len(atom.l) != self.base:
                raise InvalidModelError("Atom vectors must have length %d" % self.base)
        if self.generators and not is_valid_family(self.generators.get('family')):
            raise InvalidModelError("'%s' is not a known generator family." % self.generators.get('family'))

    @classmethod
    def from_atoms(cls, atoms, label=''):
        """Build from `[(p, W, L), ...]`"""
        atom_list = tuple(
            Atom(p=float(p), w=tuple(complex(v) for v in w), l=tuple(float(v) for v in l))
            for p, w, l in atoms
        )
        return cls(base=len(atom_list[0].w), atoms=atom_list, label=label)

    @classmethod
    def deterministic(cls, w, l, label=''):  # noqa: E741
        """A single atom with probability 1"""
        return cls.from_atoms([(1.0, w, l)], label=label)

    @classmethod
    def from_family(cls, family, label='', **params):
        """Build a model around one family of the catalogue"""
        spec = {'family': family, 'params': params}
        return cls(base=build_generator(spec).base, generators=spec, label=label)

    @classmethod
    def from_dict(cls, data):
        atoms = tuple(Atom.from_dict(atom) for atom in data.get('atoms') or [])
        return cls(
            base=int(data['base']),
            atoms=atoms,
            generators=data.get('generators'),
            label=data.get('label', ''),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            'base': self.base,
            'atoms': [atom.to_dict() for atom in self.atoms],
            'generators': self.family.to_dict() if self.generators else None,
            'label': self.label,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @property
    def is_atomic(self):
        return bool(self.atoms)

    @cached_property
    def family(self):
        """The generator family instance, None for atom models"""
        if not self.generators:
            return None
        return build_generator(self.generators)

    @cached_property
    def atom_arrays(self):
        """(p, W, L) stacked as arrays of shapes (k,), (k, b), (k, b)"""
        probabilities = np.array([atom.p for atom in self.atoms])
        w_values = np.array([atom.w for atom in self.atoms], dtype=complex)
        l_values = np.array([atom.l for atom in self.atoms], dtype=float)
        return probabilities, w_values, l_values

    @property
    def uniforms_per_node(self):
        if self.is_atomic:
            return 1
        return self.family.UNIFORMS_PER_NODE

    def atom_indices(self, uniforms):
        """Inverse-CDF choice of an atom per row of `uniforms`"""
        cumulative = np.cumsum(self.atom_arrays[0])
        indices = np.searchsorted(cumulative, uniforms[:, 0], side='right')
        return np.minimum(indices, len(self.atoms) - 1).astype(np.int32)

    def draw(self, uniforms):
        """(W, L) arrays of shape (n, b) for an (n, uniforms_per_node) array of uniforms"""
        if self.is_atomic:
            indices = self.atom_indices(uniforms)
            _, w_values, l_values = self.atom_arrays
            return w_values[indices], l_values[indices]
        return self.family.draw(uniforms)

    def is_conservative(self, side='W'):
        """True when sum_i U_i = 1 almost surely, False when certified otherwise, None when unknown"""
        if self.is_atomic:
            index = 1 if side == 'W' else 2
            sums = self.atom_arrays[index].sum(axis=1)
            return bool(np.all(np.abs(sums - 1.0) <= STRUCTURAL_TOLERANCE))

        if side == 'L':
            return bool(abs(self.family.l_weights.sum() - 1.0) <= STRUCTURAL_TOLERANCE)
        if self.family.CONSERVATIVE:
            return True
        if self.family.SUM_NOT_ONE_CERTIFIED:
            return False
        return None


@dataclass
class ValidationReport:
    """Outcome of `validate`"""
    case: str
    phi_checks: dict = field(default_factory=dict)
    has_p_gt1_positive: bool = False
    witness_p: Optional[float] = None
    critical_condition: bool = False
    gamma: Optional[float] = None
    monofractal: Optional[float] = None
    left_sided: bool = False
    two_nonzero: bool = False
    conservative: Optional[bool] = None
    mean_sum_stderr: Optional[float] = None
    messages: list = field(default_factory=list)

    @property
    def is_valid(self):
        return self.case != REJECTED

    def to_dict(self):
        return {
            'case': self.case,
            'phi_checks': {repr(q): value for q, value in self.phi_checks.items()},
            'has_p_gt1_positive': self.has_p_gt1_positive,
            'witness_p': self.witness_p,
            'critical_condition': self.critical_condition,
            'gamma': self.gamma,
            'monofractal': self.monofractal,
            'left_sided': self.left_sided,
            'two_nonzero': self.two_nonzero,
            'conservative': self.conservative,
            'mean_sum_stderr': self.mean_sum_stderr,
            'messages': list(self.messages),
        }


def phi(model, side, q):
    """-log_b E(sum_i 1{U_i != 0} |U_i|^q), negative infinity when the expectation diverges"""
    log_base = np.log(model.base)

    if model.is_atomic:
        probabilities, w_values, l_values = model.atom_arrays
        values = w_values if side == 'W' else l_values
        moduli = np.abs(values)
        nonzero = moduli > 0
        log_terms = np.log(np.broadcast_to(probabilities[:, None], moduli.shape)[nonzero]) + \
            q * np.log(moduli[nonzero])
        if log_terms.size == 0:
            return np.inf
        return float(-logsumexp(log_terms) / log_base)

    family = model.family
    if side == 'L':
        return float(-np.log(np.sum(family.l_weights ** q)) / log_base)

    divergent = family.diverges(q)
    if divergent is None:
        raise UndecidableError("Divergence of phi_W(%s) is undecidable for '%s'" % (q, family.NAME))
    if divergent:
        return -np.inf

    moments, _ = family.coordinate_moments(q)
    return float(-np.log(np.sum(moments)) / log_base)


def phi_monte_carlo(model, side, q, samples=MONTE_CARLO_SAMPLES, seed=0):
    """Monte Carlo phi with its delta-method standard error, returned as (value, stderr)"""
    uniforms = _uniforms(model, samples, seed)
    w_draws, l_draws = model.draw(uniforms)
    moduli = np.abs(w_draws if side == 'W' else l_draws)

    with np.errstate(divide='ignore'):
        per_sample = np.where(moduli > 0, moduli ** q, 0.0).sum(axis=1)
    mean = per_sample.mean()
    stderr = per_sample.std(ddof=1) / np.sqrt(samples)
    log_base = np.log(model.base)

    return float(-np.log(mean) / log_base), float(stderr / (mean * log_base))


def mean_sum_monte_carlo(model, side='W', samples=MONTE_CARLO_SAMPLES, seed=0):
    """Sample mean of sum_i U_i (complex) with the standard error of its modulus"""
    uniforms = _uniforms(model, samples, seed)
    w_draws, l_draws = model.draw(uniforms)
    sums = (w_draws if side == 'W' else l_draws).sum(axis=1)

    stderr = np.sqrt(np.var(sums.real, ddof=1) + np.var(sums.imag, ddof=1)) / np.sqrt(samples)
    return complex(sums.mean()), float(stderr)


def validate(model, seed=0, samples=MONTE_CARLO_SAMPLES):
    """Classify `model` along the convergence taxonomy, or reject it with messages"""
    report = ValidationReport(case=REJECTED)

    problems = _structural_problems(model, report, seed, samples)
    if problems:
        report.messages.extend(problems)
        LOGGER.info("Model '%s' rejected: %s", model.label, '; '.join(problems))
        return report

    for q in PHI_CHECK_POINTS:
        report.phi_checks[q] = phi(model, 'W', q)

    report.conservative = model.is_conservative('W')
    report.witness_p = find_witness_p(model)
    report.has_p_gt1_positive = report.witness_p is not None
    report.critical_condition, report.gamma = _critical_condition(model)
    report.monofractal = _monofractal_exponent(model)
    report.left_sided = left_sided_log_moment(model) == -np.inf
    report.two_nonzero = _two_nonzero(model)

    if report.critical_condition:
        report.case = CRITICAL_B2
    elif report.conservative and report.has_p_gt1_positive:
        report.case = CONSERVATIVE_B1
    elif report.conservative is False and report.has_p_gt1_positive and \
            (report.witness_p <= 2 or phi(model, 'W', 2.0) > 0):
        report.case = NON_CONSERVATIVE_A
    else:
        if report.conservative is None:
            report.messages.append("P(sum W_i != 1) > 0 cannot be certified for this family")
        report.messages.append("No convergence case applies to this model")

    if model.family is not None and not model.family.MODULUS_BOUNDED_BELOW:
        report.messages.append("E((max_i |W_i|)^-eps) < inf is an unverified assumption")

    LOGGER.info("Model '%s' classified as %s", model.label, report.case)
    return report


def find_witness_p(model):
    """Smallest grid point p > 1 with phi_W(p) > 0

    A grid hit is returned as is, without refining it towards the smallest such p. Only when no grid
    point works is the maximum of phi_W on (1, 2) located, and it is returned if phi_W is positive there.
    """
    for p in WITNESS_GRID:
        if phi(model, 'W', p) > 0:
            return p

    # phi_W is concave: locate its maximum on [1, 2] by bisection on the slope sign
    low, high = 1.0, 2.0
    step = 1e-7
    for _ in range(WITNESS_BISECTION_STEPS):
        middle = 0.5 * (low + high)
        if phi(model, 'W', middle + step) > phi(model, 'W', middle - step):
            low = middle
        else:
            high = middle
    candidate = 0.5 * (low + high)
    if candidate > 1 and phi(model, 'W', candidate) > 0:
        return candidate
    return None


def left_sided_log_moment(model):
    """E(sum_i 1{W_i != 0} L_i log|W_i|), negative infinity for left-sided families"""
    if model.is_atomic:
        probabilities, w_values, l_values = model.atom_arrays
        moduli = np.abs(w_values)
        with np.errstate(divide='ignore'):
            logs = np.where(moduli > 0, np.log(np.where(moduli > 0, moduli, 1.0)), 0.0)
        return float(np.sum(probabilities[:, None] * l_values * logs))

    family = model.family
    _, log_moments = family.coordinate_moments(0.0)
    return float(np.sum(family.l_weights * log_moments))


def preset_model(name):
    """Named models shared by the scenarios and the command line"""
    if name not in PRESET_MODELS:
        raise InvalidModelError("'%s' is not a preset model." % name)
    return PRESET_MODELS[name]()


def _structural_problems(model, report, seed, samples):
    problems = []

    if model.is_atomic:
        probabilities, w_values, l_values = model.atom_arrays
        if np.any(probabilities <= 0) or np.any(probabilities > 1):
            problems.append("Atom probabilities must lie in (0, 1]")
        if abs(probabilities.sum() - 1.0) > PROBABILITY_TOLERANCE:
            problems.append("Atom probabilities sum to %r, not 1" % probabilities.sum())
        if np.any(l_values <= 0) or np.any(l_values >= 1):
            problems.append("L coordinates must lie in (0, 1)")
        w_mean = np.sum(probabilities * w_values.sum(axis=1))
        if abs(w_mean - 1.0) > STRUCTURAL_TOLERANCE:
            problems.append("E(sum W_i) = %r, not 1" % w_mean)
        l_mean = np.sum(probabilities * l_values.sum(axis=1))
        if abs(l_mean - 1.0) > STRUCTURAL_TOLERANCE:
            problems.append("E(sum L_i) = %r, not 1" % l_mean)
        if _same_law(model):
            problems.append("W equals L")
        return problems

    family = model.family
    exact_mean = family.mean_w().sum()
    if abs(exact_mean - 1.0) > STRUCTURAL_TOLERANCE:
        problems.append("E(sum W_i) = %r, not 1" % exact_mean)
    if abs(family.l_weights.sum() - 1.0) > STRUCTURAL_TOLERANCE:
        problems.append("E(sum L_i) = %r, not 1" % family.l_weights.sum())

    sampled_mean, stderr = mean_sum_monte_carlo(model, 'W', samples, seed)
    report.mean_sum_stderr = stderr
    if abs(sampled_mean - 1.0) > max(3.0 * stderr, STRUCTURAL_TOLERANCE):
        problems.append("Sampled E(sum W_i) = %r is more than 3 standard errors from 1" % sampled_mean)
    return problems


def _same_law(model):
    """W and L carry the same distribution (checked on the atom mixture)"""
    probabilities, w_values, l_values = model.atom_arrays
    w_law, l_law = defaultdict(float), defaultdict(float)
    for probability, w_row, l_row in zip(probabilities, w_values, l_values):
        w_law[_rounded(w_row)] += probability
        l_law[_rounded(l_row.astype(complex))] += probability

    if set(w_law) != set(l_law):
        return False
    return all(abs(w_law[key] - l_law[key]) <= PROBABILITY_TOLERANCE for key in w_law)


def _rounded(row):
    return tuple((round(value.real, 10), round(value.imag, 10)) for value in row)


def _critical_condition(model):
    """Check the critical-case structure, returning (holds, gamma)"""
    if not model.is_atomic or not model.is_conservative('W'):
        return False, None

    probabilities, w_values, _ = model.atom_arrays
    moduli = np.abs(w_values)
    unit = np.abs(moduli - 1.0) <= STRUCTURAL_TOLERANCE

    if np.any(moduli > 1.0 + STRUCTURAL_TOLERANCE):
        return False, None
    if abs(np.sum(probabilities * unit.sum(axis=1)) - 1.0) > STRUCTURAL_TOLERANCE:
        return False, None
    if np.sum(probabilities[unit.sum(axis=1) == 1]) >= 1.0 - PROBABILITY_TOLERANCE:
        return False, None

    for w_row, unit_row in zip(w_values, unit):
        partial_sums = np.concatenate([[0.0], np.cumsum(w_row)])
        for i in np.flatnonzero(unit_row):
            pair = (partial_sums[i], partial_sums[i + 1])
            if not (_close(pair, (0.0, 1.0)) or _close(pair, (1.0, 0.0))):
                return False, None

    largest = float(moduli[~unit].max()) if np.any(~unit) else 0.0
    for k in range(1, 53):
        gamma = 1.0 - 2.0 ** (-k)
        if gamma >= largest:
            return True, gamma
    return False, None


def _close(pair, target):
    return abs(pair[0] - target[0]) <= STRUCTURAL_TOLERANCE and abs(pair[1] - target[1]) <= STRUCTURAL_TOLERANCE


def _monofractal_exponent(model):
    """H with |W_i| = L_i^H on every nonzero coordinate, None when no such H exists"""
    if not model.is_atomic:
        return None

    _, w_values, l_values = model.atom_arrays
    moduli = np.abs(w_values)
    nonzero = moduli > 0
    if not np.any(nonzero):
        return None

    first = np.argwhere(nonzero)[0]
    exponent = np.log(moduli[tuple(first)]) / np.log(l_values[tuple(first)])
    if np.all(np.abs(moduli[nonzero] - l_values[nonzero] ** exponent) <= STRUCTURAL_TOLERANCE):
        return float(exponent)
    return None


def _two_nonzero(model):
    if not model.is_atomic:
        return model.family.TWO_NONZERO
    _, w_values, _ = model.atom_arrays
    return bool(np.all((np.abs(w_values) > 0).sum(axis=1) >= 2))


def _uniforms(model, samples, seed):
    generator = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 0x5EED])))
    return generator.random((samples, model.uniforms_per_node))


def _as_pair(value):
    if isinstance(value, (list, tuple)):
        return value
    return (value, 0.0)


def _binomial():
    return WeightModel.deterministic((0.3, 0.7), (0.5, 0.5), label='binomial')


def _monofractal():
    return WeightModel.deterministic(((1 + 1j) / 2, (1 - 1j) / 2), (0.5, 0.5), label='monofractal')


def _critical():
    third = 1.0 / 3.0
    return WeightModel.from_atoms([
        (third, (1, -1, 1), (third, third, third)),
        (1.0 - third, (0.4, 0.4, 0.2), (third, third, third)),
    ], label='critical')


def _cantor():
    return WeightModel.from_atoms([
        (0.5, (0.0, 1.0), (0.5, 0.5)),
        (0.5, (0.4, 0.6), (0.5, 0.5)),
    ], label='cantor')


PRESET_MODELS = {
    'binomial': _binomial,
    'monofractal': _monofractal,
    'critical': _critical,
    'cantor': _cantor,
    'beta-split': lambda: WeightModel.from_family('beta_split', label='beta-split', alpha=2.0, beta=2.0),
    'uniform-phase': lambda: WeightModel.from_family('uniform_phase', label='uniform-phase', rho=0.3),
    'heavy-log': lambda: WeightModel.from_family('heavy_log', label='heavy-log', v_min=1.0),
}
