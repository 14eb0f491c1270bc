# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""The primary class responsible for orchestrating one experiment run

It performs the following steps for a validated RunConfig:
    1. Validates the weight model and checks it against the scenario's expected case
    2. Samples the replica weight trees from node-addressed seeds
    3. Computes the analytic curves: J, the linearized tau and its Legendre transform
    4. Estimates tau empirically for every order m from the partition sums of the replicas
    5. Adds the scenario's own sections (critical trend, corollary kink, mu_q targeting...)
    6. Builds the ComparisonReport with its provenance block

The `run` method wraps these steps; `write` persists the report and its plot data under a hive-style
run path, locally or on S3.
"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy

from cascademf.analytic_spectrum import full_spectrum_curve, interval_J, legendre, legendre_parametric
from cascademf.cascade import composed_samples, replica_seed, sample_tree
from cascademf.empirical_spectrum import coarse_spectrum, empirical_tau, sample_mu_q
from cascademf.exceptions import CascadeError, ConfigError, InvalidModelError
from cascademf.plot_data import emit_plot_data
from cascademf.scenarios import SCENARIO_DEFINITIONS, is_valid_scenario
from cascademf.utils import artifact_writer, build_run_path, run_stamp, worker_count
from cascademf.version import __version__
from cascademf.weights import validate

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

REPORT_NAME = 'report.json'
H_GRID_POINTS = 121
H_GRID_SPAN = 10.0


def plain(value):
    """JSON-ready copy of `value`: numpy scalars unwrapped, NaN as null, infinities as strings"""
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [plain(item) for item in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if np.isnan(value):
            return None
        if np.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return value
    if isinstance(value, complex):
        return [plain(value.real), plain(value.imag)]
    return value


@dataclass
class ComparisonReport:
    """Analytic versus empirical spectra of one run, with pass/fail checks and provenance"""
    scenario: str
    model: dict
    validation: dict
    interval: dict
    rows: list
    sup_gaps: dict
    analytic_curve: list
    empirical_curves: dict
    legendre: dict
    coarse: dict
    mu_q_samples: dict
    sections: dict
    checks: list
    provenance: dict
    partial: bool = False
    errors: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.partial and all(check['passed'] for check in self.checks)

    def to_dict(self):
        return plain({
            'scenario': self.scenario,
            'model': self.model,
            'validation': self.validation,
            'interval': self.interval,
            'rows': self.rows,
            'sup_gaps': self.sup_gaps,
            'analytic_curve': self.analytic_curve,
            'empirical_curves': self.empirical_curves,
            'legendre': self.legendre,
            'coarse': self.coarse,
            'mu_q_samples': self.mu_q_samples,
            'sections': self.sections,
            'checks': self.checks,
            'passed': self.passed,
            'partial': self.partial,
            'errors': self.errors,
            'provenance': self.provenance,
        })

    def to_json(self):
        """Byte-stable UTF-8 JSON"""
        return (json.dumps(self.to_dict(), sort_keys=True, indent=2) + '\n').encode('utf-8')


class ExperimentRunner:
    """This class manages one experiment: model validation, replica sampling, estimation and reporting"""

    def __init__(self, config):
        config.validate()
        if not is_valid_scenario(config.scenario):
            raise ConfigError("'%s' is not yet a supported scenario." % config.scenario)

        self.config = config
        self.scenario = SCENARIO_DEFINITIONS[config.scenario](config)
        self.model = config.resolve_model()

        self.validation = None
        self.realizations = []
        self.interval = None
        self.analytic = None
        self.empirical = {}
        self.sections = {}
        self.errors = []
        self._composed = {}
        self._mu_q = {}

    def validate_model(self):
        """Run weights.validate and refuse models outside the scenario's expected cases"""
        self.validation = validate(self.model, seed=self.config.seed)
        if not self.validation.is_valid:
            raise InvalidModelError("Model '%s' was rejected: %s" % (self.model.label, '; '.join(self.validation.messages)))

        expected = self.scenario.EXPECTED_CASES
        if expected and self.validation.case not in expected:
            raise InvalidModelError(
                "Scenario '%s' expects a %s model, '%s' is %s"
                % (self.config.scenario, ' or '.join(expected), self.model.label, self.validation.case)
            )
        LOGGER.info("Model '%s' validated as %s", self.model.label, self.validation.case)

    def sample_replicas(self):
        """Sample one weight tree per replica; replica r uses the seed derived from (seed, r)"""
        config = self.config
        seeds = [replica_seed(config.seed, replica) for replica in range(config.replicas)]

        def sample(seed):
            return sample_tree(self.model, config.depth, seed, config.node_budget)

        with ThreadPoolExecutor(max_workers=worker_count()) as executor:
            self.realizations = list(executor.map(sample, seeds))
        LOGGER.info("Sampled %d replicas to depth %d", len(self.realizations), config.depth)

    def compute_analytic(self):
        """J and the linearized tau on the configured q grid"""
        self.interval = interval_J(self.model)
        self.analytic = full_spectrum_curve(self.model, self.config.q_grid, self.interval)

    def estimate_spectra(self):
        """Empirical tau for every configured order m"""
        config = self.config
        for order in config.m:
            LOGGER.info("Estimating the m=%d spectrum on levels %s", order, list(config.levels))
            self.empirical[order] = empirical_tau(self.realizations, order, config.q_grid, config.levels,
                                                  config.sub_depth, config.q_min)

    def composed(self, replica):
        """ComposedSamples of replica `replica` at full depth"""
        if replica not in self._composed:
            real = self.realizations[replica]
            self._composed[replica] = composed_samples(real, real.depth)
        return self._composed[replica]

    def mu_q_sample(self, q):
        """mu_q sample on the first replica with target depth = depth - y_trunc_depth"""
        if q not in self._mu_q:
            config = self.config
            self._mu_q[q] = sample_mu_q(self.realizations[0], q, config.depth - config.y_trunc_depth,
                                        config.y_trunc_depth, draws=config.mu_draws, seed=config.seed,
                                        interval=self.interval)
        return self._mu_q[q]

    def scenario_sections(self):
        """Scenario-specific sections; a failure marks the report partial instead of aborting it"""
        try:
            self.sections = self.scenario.sections(self)
        except CascadeError as error:
            LOGGER.error("Scenario '%s' sections failed: %s", self.config.scenario, error)
            self.errors.append("%s: %s" % (type(error).__name__, error))
            self.sections = {}

    def build_report(self):
        """Assemble the ComparisonReport from the runner state"""
        config = self.config
        rows, sup_gaps = self._comparison_rows()
        checks = [] if self.errors else self.scenario.checks(sup_gaps, self.sections)

        return ComparisonReport(
            scenario=config.scenario,
            model=self.model.to_dict(),
            validation=self.validation.to_dict(),
            interval=self.interval.to_dict(),
            rows=rows,
            sup_gaps=sup_gaps,
            analytic_curve=self.analytic.rows(),
            empirical_curves={order: self._empirical_rows(curve) for order, curve in self.empirical.items()},
            legendre=self._legendre_curves(),
            coarse=self._coarse(),
            mu_q_samples=self._mu_q_rows(),
            sections=dict(self.sections, hierarchy=self._hierarchy()),
            checks=checks,
            provenance=self.provenance(),
            partial=bool(self.errors),
            errors=list(self.errors),
        )

    def provenance(self):
        config = self.config
        return {
            'seed': config.seed,
            'depth': config.depth,
            'levels': list(config.levels),
            'sub_depth': config.sub_depth,
            'replicas': config.replicas,
            'q_grid': list(config.q_grid),
            'm': list(config.m),
            'config': config.to_dict(),
            'versions': {'cascademf': __version__, 'numpy': np.__version__, 'scipy': scipy.__version__},
        }

    def run(self):
        """A wrapper for the full experiment: the steps above in order, returning the report"""
        self.validate_model()
        self.sample_replicas()
        self.compute_analytic()
        self.estimate_spectra()
        self.scenario_sections()
        report = self.build_report()
        LOGGER.info("Scenario '%s' %s", self.config.scenario, 'passed' if report.passed else 'failed')
        return report

    def write(self, report, now=None):
        """Persist the report and its plot data under <out>/scenario=/seed=/run=, return the run location"""
        location = build_run_path(self.config.out, [
            ('scenario', self.config.scenario),
            ('seed', self.config.seed),
            ('run', run_stamp(now)),
        ])
        writer = artifact_writer(location)
        writer.write(REPORT_NAME, report.to_json())
        emit_plot_data(report, writer)
        LOGGER.info("Report written to %s", location)
        return location

    def _comparison_rows(self):
        window = self.scenario.gap_window(self)
        analytic = self.analytic
        rows, sup_gaps = [], {}

        for order, curve in sorted(self.empirical.items()):
            gaps = np.abs(analytic.tau - curve.tau)
            usable = analytic.in_j & np.isfinite(gaps)
            if window is not None:
                usable &= (analytic.q >= window[0]) & (analytic.q <= window[1])
            sup_gaps[order] = float(gaps[usable].max()) if np.any(usable) else np.nan

            for position, q in enumerate(analytic.q):
                rows.append({
                    'm': order,
                    'q': q,
                    'analytic': analytic.tau[position],
                    'empirical': curve.tau[position],
                    'gap': gaps[position],
                    'stderr': curve.stderr[position],
                    'in_j': analytic.in_j[position],
                })
        return rows, sup_gaps

    @staticmethod
    def _empirical_rows(curve):
        return [
            [q, t_hat, stderr, used]
            for q, t_hat, stderr, used in zip(curve.q, curve.tau, curve.stderr, curve.levels_used)
        ]

    def _h_grid(self):
        slopes = self.analytic.tau_prime[np.isfinite(self.analytic.tau_prime)]
        if slopes.size == 0:
            return np.linspace(0.0, 2.0, H_GRID_POINTS)
        low, high = float(slopes.min()), float(min(slopes.max(), slopes.min() + H_GRID_SPAN))
        if high - low < 1e-9:
            low, high = low - 0.5, high + 0.5
        return np.round(np.linspace(low, high, H_GRID_POINTS), 12)

    def _legendre_curves(self):
        h_grid = self._h_grid()
        analytic = legendre(self.analytic, h_grid)
        parametric = legendre_parametric(self.model, self.analytic.q[self.analytic.in_j])
        return {
            'analytic': analytic.rows(),
            'analytic_support': list(analytic.support),
            'parametric': parametric.rows(),
            'empirical': {order: legendre(curve, h_grid).rows() for order, curve in self.empirical.items()},
        }

    def _coarse(self):
        config = self.config
        try:
            spectrum = coarse_spectrum(self.realizations[0], min(config.m), max(config.levels), config.sub_depth,
                                       config.eps)
        except CascadeError as error:
            self.errors.append("%s: %s" % (type(error).__name__, error))
            return {}
        return {'rows': spectrum.rows(), 'void_count': spectrum.void_count, 'epsilon': spectrum.epsilon}

    def _mu_q_rows(self):
        samples = {}
        for q in self.config.mu_q:
            try:
                samples[repr(float(q))] = self.mu_q_sample(q).rows()
            except CascadeError as error:
                LOGGER.warning("No mu_q sample at q=%s: %s", q, error)
        return samples

    def _hierarchy(self):
        """Count of q >= 0 where tau_hat at order m falls below the m=1 estimate minus its error bar"""
        if 1 not in self.empirical:
            return {}
        base = self.empirical[1]
        margin = np.nan_to_num(base.stderr, nan=0.0)
        violations = {}
        for order, curve in self.empirical.items():
            if order == 1:
                continue
            below = (base.q >= 0) & (curve.tau < base.tau - margin)
            violations[order] = int(np.count_nonzero(below))
        return violations


def run_scenario(config):
    """Run the experiment described by `config` and return its ComparisonReport"""
    return ExperimentRunner(config).run()
