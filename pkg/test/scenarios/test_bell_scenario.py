# pylint: skip-file
import numpy as np
import pytest

from cascademf.config import RunConfig, load_config
from cascademf.runner import run_scenario
from cascademf.scenarios.bell import MU_Q_TOLERANCE, BellScenario


def test_defaults_load():
    config = load_config(scenario='bell')
    assert config.model == 'beta-split'
    assert config.mu_q == (0.5, 1.0, 2.0)


def test_mu_q_checks():
    scenario = BellScenario(RunConfig(scenario='bell'))
    sections = {'mu_q': [{'q': 1.0, 'gap': 0.02}, {'q': 2.0, 'gap': 0.5}, {'q': 0.5, 'gap': np.nan}]}
    checks = scenario.extra_checks(sections)
    assert [check['name'] for check in checks] == ['mu_q_1.0', 'mu_q_2.0', 'mu_q_0.5']
    assert [check['passed'] for check in checks] == [True, False, False]
    assert checks[0]['threshold'] == MU_Q_TOLERANCE


def test_small_run_reports_mu_q_targets():
    config = RunConfig(scenario='bell', model='beta-split', depth=10, levels=(4, 5, 6), sub_depth=2, replicas=4,
                       q_grid=(0.0, 1.0, 2.0), mu_q=(1.0,), mu_draws=8, seed=1)
    report = run_scenario(config)
    entry = report.sections['mu_q'][0]
    assert entry['q'] == 1.0
    assert entry['points'] > 0
    assert entry['tau_prime'] > 0
    assert not entry['underflow']
    assert [check['name'] for check in report.checks] == ['sup_gap_m1', 'mu_q_1.0']


@pytest.mark.slow
def test_default_run_passes():
    assert run_scenario(load_config(scenario='bell')).passed
