# pylint: skip-file
import json
from datetime import datetime, timezone

import numpy as np
import pytest

from cascademf.analytic_spectrum import tau
from cascademf.config import RunConfig
from cascademf.exceptions import ConfigError, InvalidModelError, NoRootError
from cascademf.runner import ExperimentRunner, plain, run_scenario
from cascademf.scenarios.custom import CustomScenario
from cascademf.weights import CONSERVATIVE_B1, WeightModel, preset_model


def small_config(**changes):
    values = dict(scenario='custom', model='binomial', depth=7, levels=(3, 4), sub_depth=2, replicas=2,
                  q_grid=(0.0, 1.0, 2.0), mu_q=(1.0,), mu_draws=4, seed=5)
    values.update(changes)
    return RunConfig(**values)


@pytest.fixture(scope='module')
def report():
    return run_scenario(small_config())


def test_plain():
    value = plain({'a': np.float64('nan'), 'b': [np.inf, -np.inf], 'c': np.int64(3), 1: np.bool_(True),
                   'd': 1 + 2j})
    assert value == {'a': None, 'b': ['inf', '-inf'], 'c': 3, '1': True, 'd': [1.0, 2.0]}


def test_deterministic_model_matches_analytic(report):
    assert report.passed
    assert not report.partial
    assert report.sup_gaps[1] <= 1e-8
    assert report.validation['case'] == CONSERVATIVE_B1
    assert [row['q'] for row in report.rows] == [0.0, 1.0, 2.0]
    assert report.checks[0]['name'] == 'sup_gap_m1'
    assert list(report.mu_q_samples) == ['1.0']
    assert len(report.mu_q_samples['1.0']) == 2 ** 5


def test_configured_q_min_reaches_the_estimator():
    runner = ExperimentRunner(small_config(q_grid=(-2.5, 0.0, 1.0), q_min=-3.0, mu_q=()))
    runner.validate_model()
    runner.sample_replicas()
    runner.estimate_spectra()
    assert runner.empirical[1].tau[0] == pytest.approx(tau(preset_model('binomial'), -2.5), abs=1e-8)


def test_report_bytes_are_reproducible(report):
    again = run_scenario(small_config())
    assert again.to_json() == report.to_json()

    document = json.loads(report.to_json())
    assert document['provenance']['seed'] == 5
    assert document['interval']['q_upper'] == 'inf'
    assert report.to_json().endswith(b'\n')


def test_write(report, tmp_path):
    runner = ExperimentRunner(small_config(out=str(tmp_path)))
    now = datetime(2024, 1, 2, 3, 4, 5, tzinfo=timezone.utc)
    location = runner.write(report, now=now)

    assert location == '%s/scenario=custom/seed=5/run=20240102T030405000000Z' % tmp_path
    run_directory = tmp_path / 'scenario=custom' / 'seed=5' / 'run=20240102T030405000000Z'
    assert (run_directory / 'report.json').read_bytes() == report.to_json()
    manifest = json.loads((run_directory / 'manifest.json').read_text())
    files = [entry['file'] for entry in manifest['files']]
    assert 'analytic_tau.csv' in files
    assert 'empirical_tau_m1.csv' in files
    assert all((run_directory / name).exists() for name in files)


def test_failing_sections_mark_the_report_partial(mocker):
    mocker.patch.object(CustomScenario, 'sections', side_effect=NoRootError('no crossing'))
    partial = run_scenario(small_config(mu_q=()))
    assert partial.partial
    assert not partial.passed
    assert partial.checks == []
    assert partial.errors == ['NoRootError: no crossing']


def test_rejected_model():
    rejected = WeightModel.deterministic((0.2, 0.2), (0.5, 0.5), label='lossy')
    with pytest.raises(InvalidModelError):
        ExperimentRunner(small_config(model=rejected)).validate_model()


def test_invalid_config():
    with pytest.raises(ConfigError):
        ExperimentRunner(small_config(scenario='nowhere'))


def test_hierarchy_counts_orders():
    runner = ExperimentRunner(small_config(m=(1, 2), mu_q=()))
    result = runner.run()
    assert set(result.empirical_curves) == {1, 2}
    assert list(result.sections['hierarchy']) == [2]
    assert list(result.legendre['empirical']) == [1, 2]
