# pylint: skip-file
import numpy as np
import pytest

from cascademf.exceptions import InvalidModelError
from cascademf.generators.uniform_phase import UniformPhaseGenerator


def test_second_moment():
    # E|1/2 + rho e^{i theta}|^2 = 1/4 + rho^2
    generator = UniformPhaseGenerator(rho=0.3)
    moments, _ = generator.coordinate_moments(2.0)
    assert moments == pytest.approx([0.34, 0.34], rel=1e-12)


def test_zero_moment_and_mean():
    generator = UniformPhaseGenerator(rho=0.2)
    moments, _ = generator.coordinate_moments(0.0)
    assert moments == pytest.approx([1.0, 1.0])
    assert generator.mean_w().sum() == 1.0
    assert not generator.diverges(-40.0)


def test_draws_sum_to_one():
    generator = UniformPhaseGenerator(rho=0.3)
    w_draws, _ = generator.draw(np.array([[0.0], [0.25], [0.8]]))
    assert np.allclose(w_draws.sum(axis=1), 1.0)
    assert w_draws[1, 0] == pytest.approx(0.5 + 0.3j)
    assert np.allclose(np.abs(w_draws - 0.5), 0.3)


def test_invalid_rho():
    with pytest.raises(InvalidModelError):
        UniformPhaseGenerator(rho=0.5)
    with pytest.raises(InvalidModelError):
        UniformPhaseGenerator(rho=0.0)
