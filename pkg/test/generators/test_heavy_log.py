# pylint: skip-file
import numpy as np
import pytest
from scipy import special

from cascademf.exceptions import DivergentExpectationError, InvalidModelError
from cascademf.generators.heavy_log import HeavyLogGenerator


def test_mean_is_one():
    generator = HeavyLogGenerator(v_min=1.0)
    assert generator.mean_w().sum() == pytest.approx(1.0, abs=1e-15)
    assert generator.w_rest == pytest.approx(1.0 - special.expn(2, 1.0))


def test_log_moment_is_infinite_at_zero():
    generator = HeavyLogGenerator()
    moments, log_moments = generator.coordinate_moments(0.0)
    assert moments == pytest.approx([1.0, 1.0])
    assert log_moments[0] == -np.inf
    assert np.isfinite(log_moments[1])


def test_first_moment():
    generator = HeavyLogGenerator(v_min=2.0)
    moments, _ = generator.coordinate_moments(1.0)
    assert moments[0] == pytest.approx(special.expn(2, 2.0))


def test_draws_underflow_to_zero():
    generator = HeavyLogGenerator()
    w_draws, _ = generator.draw(np.array([[0.0], [0.5], [1.0 - 1e-16]]))
    assert w_draws[0, 0] == pytest.approx(np.exp(-1.0))
    assert w_draws[1, 0] == pytest.approx(np.exp(-2.0))
    assert w_draws[2, 0] == 0
    assert np.all(w_draws[:, 1] == generator.w_rest)


def test_negative_moments_diverge():
    generator = HeavyLogGenerator()
    assert generator.diverges(-0.1)
    with pytest.raises(DivergentExpectationError):
        generator.coordinate_moments(-0.1)


def test_invalid_parameters():
    with pytest.raises(InvalidModelError):
        HeavyLogGenerator(v_min=0.0)
