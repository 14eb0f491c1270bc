# pylint: skip-file
import numpy as np
import pytest

from cascademf.config import RunConfig, load_config
from cascademf.runner import run_scenario
from cascademf.scenarios.corollary import (ADDEND_DEFINITIONS, CorollaryScenario, is_valid_addend,
                                           kink_estimate)


def test_addends():
    assert is_valid_addend('cis')
    assert not is_valid_addend('sin')
    assert ADDEND_DEFINITIONS['cis'](np.array([0.0]))[0] == 1.0


def test_kink_estimate():
    q_grid = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    tau_f = np.array([-1.0, -0.3, 0.0, 0.2, 0.35])
    tau_g = np.minimum(tau_f, q_grid - 1.0)
    assert kink_estimate(q_grid, tau_g, tau_f, 1) == pytest.approx(1.0)


def test_kink_estimate_without_a_kink():
    q_grid = np.array([0.0, 0.5, 1.0, 1.5, 2.0])
    tau_f = np.array([-1.0, -0.3, 0.0, 0.2, 0.35])
    assert kink_estimate(q_grid, tau_f, tau_f, 1) == 0.0
    # a curve on the line all the way puts the breakpoint at the last grid point
    assert kink_estimate(q_grid, q_grid - 1.0, tau_f, 1) == 2.0
    assert np.isnan(kink_estimate(q_grid, np.full(5, np.nan), tau_f, 1))


def test_checks():
    scenario = CorollaryScenario(RunConfig(scenario='corollary-cw'))
    sections = {'orders': [{'m': 1, 'q_m': 1.0, 'kink_estimate': 1.1, 'sup_gap': 0.05},
                           {'m': 2, 'q_m': np.nan, 'kink_estimate': np.nan, 'sup_gap': 0.3}]}
    checks = scenario.extra_checks(sections)
    assert [check['name'] for check in checks] == ['prediction_gap_m1', 'kink_m1', 'prediction_gap_m2', 'kink_m2']
    assert [check['passed'] for check in checks] == [True, True, False, False]


def test_small_run():
    config = RunConfig(scenario='corollary-cw', model='binomial', depth=9, levels=(4, 5, 6), sub_depth=3,
                       replicas=2, q_grid=tuple(np.arange(0.0, 3.01, 0.125)), addend='exp', seed=4)
    report = run_scenario(config)
    order = report.sections['orders'][0]
    assert order['q_m'] == pytest.approx(1.0, abs=1e-9)
    assert order['kink_estimate'] == pytest.approx(1.0, abs=0.25)
    assert len(order['rows']) == len(config.q_grid)
    assert report.sections['addend'] == 'exp'


def test_vanishing_addend_has_no_kink(mocker):
    mocker.patch.dict(ADDEND_DEFINITIONS, {'exp': lambda x: 0.0 * x})
    config = RunConfig(scenario='corollary-cw', model='binomial', depth=9, levels=(4, 5, 6), sub_depth=3,
                       replicas=2, q_grid=tuple(np.arange(0.0, 3.01, 0.125)), addend='exp', seed=4)
    report = run_scenario(config)
    order = report.sections['orders'][0]
    assert order['kink_estimate'] < 0.5
    kink = [check for check in report.checks if check['name'] == 'kink_m1'][0]
    assert not kink['passed']
    assert not report.passed


@pytest.mark.slow
def test_default_run_passes():
    assert run_scenario(load_config(scenario='corollary-cw')).passed
