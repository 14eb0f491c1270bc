# pylint: skip-file
from types import SimpleNamespace

import numpy as np
import pytest

from cascademf.cascade import replica_seed, sample_tree
from cascademf.config import RunConfig, load_config
from cascademf.runner import run_scenario
from cascademf.scenarios.left_sided import MARTINGALE_SIGMAS, PROBE_POINTS, LeftSidedScenario
from cascademf.weights import preset_model


@pytest.fixture(scope='module')
def sections():
    model = preset_model('heavy-log')
    runner = SimpleNamespace(
        model=model,
        realizations=[sample_tree(model, 6, replica_seed(0, replica)) for replica in range(8)],
    )
    return LeftSidedScenario(RunConfig(scenario='left-sided', model='heavy-log')).sections(runner)


def test_probe(sections):
    probe = sections['left_sided_probe']
    assert probe['passed']
    assert probe['tau_prime'] > probe['threshold']


def test_tau_prime_grows_toward_zero(sections):
    slopes = [value for _, value in sections['tau_prime_near_zero']]
    assert [q for q, _ in sections['tau_prime_near_zero']] == list(PROBE_POINTS)
    assert np.all(np.diff(slopes) > 0)


def test_martingale_section(sections):
    assert np.isfinite(sections['martingale']['mean'])
    assert sections['martingale']['stderr'] >= 0


def test_probe_check(sections):
    checks = LeftSidedScenario(RunConfig()).extra_checks(sections)
    assert [check['name'] for check in checks] == ['left_sided_probe', 'martingale_mean']
    assert checks[0]['passed']
    assert checks[1]['threshold'] == pytest.approx(MARTINGALE_SIGMAS * sections['martingale']['stderr'])


@pytest.mark.parametrize('mean,stderr,passed', [
    (1.02, 0.01, True),
    (0.95, 0.01, False),
    (1.0, np.nan, False),
])
def test_martingale_check(sections, mean, stderr, passed):
    shifted = dict(sections, martingale={'mean': mean, 'stderr': stderr})
    check = LeftSidedScenario(RunConfig()).extra_checks(shifted)[1]
    assert check['name'] == 'martingale_mean'
    assert check['passed'] is passed


@pytest.mark.slow
def test_default_run_passes():
    report = run_scenario(load_config(scenario='left-sided'))
    assert report.interval['lower_is_domain_edge'] is True
    assert report.passed
