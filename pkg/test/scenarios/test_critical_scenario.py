# pylint: skip-file
import pytest

from cascademf.config import RunConfig, load_config
from cascademf.runner import run_scenario
from cascademf.scenarios.critical import CriticalScenario


def test_trend_check():
    scenario = CriticalScenario(RunConfig(scenario='bell-critical', model='critical'))
    decreasing = {'minimum_exponent_trend': [[8, 0.4], [10, 0.3], [12, 0.25]]}
    flat = {'minimum_exponent_trend': [[8, 0.4], [10, 0.4], [12, 0.3]]}
    assert scenario.extra_checks(decreasing)[0]['passed']
    assert not scenario.extra_checks(flat)[0]['passed']
    assert scenario.checks({1: 1.0}, decreasing)[0]['name'] == 'minimum_exponent_decreasing'


def test_defaults_leave_room_for_the_trend():
    config = load_config(scenario='bell-critical')
    assert config.depth >= 12 + 1


@pytest.mark.slow
def test_default_run_passes():
    report = run_scenario(load_config(scenario='bell-critical'))
    assert report.validation['case'] == 'CriticalB2'
    assert report.passed
