# Copyright 2018 Amazon.com, Inc. or its affiliates. All Rights Reserved.

# Licensed under the Apache License, Version 2.0 (the "License").
# You may not use this file except in compliance with the License.
# A copy of the License is located at

# http://www.apache.org/licenses/LICENSE-2.0

# or in the "license" file accompanying this file. This file is distributed
# on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either
# express or implied. See the License for the specific language governing
# permissions and limitations under the License.

"""Smooth perturbations G = F + f: the m-order spectrum follows q m - 1 below q_m and tau above"""
import logging

import numpy as np

from cascademf.analytic_spectrum import predicted_tau_G, smooth_addend_root, tau
from cascademf.empirical_spectrum import aggregate_partition_tables, sample_partition_table
from cascademf.exceptions import NoRootError
from cascademf.scenarios.base_scenario import BaseScenario, build_check

# For now, enabe logging directly inside the module
logging.basicConfig(level=logging.INFO)
LOGGER = logging.getLogger(__name__)

# Every derivative of these addends is non-vanishing on [0, 1]
ADDEND_DEFINITIONS = {
    'exp': np.exp,
    'exp2': lambda x: np.exp(2.0 * x),
    'cis': lambda x: np.exp(1j * x),
}

PREDICTION_TOLERANCE = 0.1
KINK_TOLERANCE = 0.2
WINDOW_BEYOND_KINK = 2.0


def is_valid_addend(name):
    """Determines whether `name` is part of the smooth addend catalogue"""
    return name in ADDEND_DEFINITIONS


def kink_estimate(q_grid, tau_g, tau_f, m):
    """Breakpoint of the best two-piece fit of tau_g: the line q m - 1 below it, tau_f above it

    The breakpoint is placed where the two pieces cross between the last line point and the first
    tau_f point, or halfway between them when they do not cross there.
    """
    q_grid = np.asarray(q_grid, dtype=float)
    tau_g = np.asarray(tau_g, dtype=float)
    tau_f = np.asarray(tau_f, dtype=float)
    usable = np.isfinite(tau_g) & np.isfinite(tau_f)
    if np.count_nonzero(usable) < 2:
        return np.nan

    q, g, f = q_grid[usable], tau_g[usable], tau_f[usable]
    line = q * m - 1.0
    costs = [np.sum((g[:k] - line[:k]) ** 2) + np.sum((g[k:] - f[k:]) ** 2) for k in range(q.size + 1)]
    k = int(np.argmin(costs))
    if k == 0:
        return float(q[0])
    if k == q.size:
        return float(q[-1])

    above_low, above_high = f[k - 1] - line[k - 1], f[k] - line[k]
    if above_low > 0 >= above_high:
        share = above_low / (above_low - above_high)
        return float(q[k - 1] + share * (q[k] - q[k - 1]))
    return float(0.5 * (q[k - 1] + q[k]))


class CorollaryScenario(BaseScenario):
    """Adds a smooth addend to the composed samples and re-estimates the m-order spectrum"""
    NAME = 'corollary-cw'
    DEFAULTS = {
        'model': 'binomial',
        'depth': 12,
        'levels': [4, 5, 6, 7, 8, 9],
        'sub_depth': 3,
        'replicas': 8,
        'q_grid': {'start': 0.0, 'stop': 3.0, 'step': 0.125},
        'addend': 'exp',
    }

    def gap_window(self, runner):
        return None

    def sections(self, runner):
        config = runner.config
        addend = ADDEND_DEFINITIONS[config.addend]
        q_grid = np.asarray(config.q_grid)
        orders = []

        for m in config.m:
            try:
                q_m = smooth_addend_root(runner.model, m)
            except NoRootError as error:
                LOGGER.warning("No smooth-addend root for m=%d: %s", m, error)
                q_m = np.nan

            tables = [
                sample_partition_table(runner.composed(replica).with_addend(addend), m, config.levels, q_grid,
                                       replica, runner.model.base, config.q_min)
                for replica in range(len(runner.realizations))
            ]
            curve = aggregate_partition_tables(tables)
            if np.isfinite(q_m):
                predicted = np.array([predicted_tau_G(runner.model, m, q, q_m=q_m) for q in q_grid])
            else:
                predicted = np.array([tau(runner.model, q) for q in q_grid])

            window = (q_grid >= 0) & (q_grid <= (q_m + WINDOW_BEYOND_KINK if np.isfinite(q_m) else np.inf))
            gaps = np.abs(curve.tau - predicted)
            usable = window & np.isfinite(gaps)
            orders.append({
                'm': m,
                'q_m': q_m,
                'kink_estimate': kink_estimate(q_grid, curve.tau, runner.empirical[m].tau, m),
                'rows': [
                    [float(q), float(value), float(error), float(expected)]
                    for q, value, error, expected in zip(q_grid, curve.tau, curve.stderr, predicted)
                ],
                'sup_gap': float(gaps[usable].max()) if np.any(usable) else np.nan,
            })

        return {'addend': config.addend, 'orders': orders}

    def extra_checks(self, sections):
        results = []
        for entry in sections['orders']:
            gap = entry['sup_gap']
            results.append(build_check('prediction_gap_m%d' % entry['m'], gap, PREDICTION_TOLERANCE,
                                       np.isfinite(gap) and gap <= PREDICTION_TOLERANCE))
            kink_gap = abs(entry['kink_estimate'] - entry['q_m'])
            results.append(build_check('kink_m%d' % entry['m'], kink_gap, KINK_TOLERANCE,
                                       np.isfinite(kink_gap) and kink_gap <= KINK_TOLERANCE))
        return results
