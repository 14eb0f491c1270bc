# pylint: skip-file
from math import comb, log2

import numpy as np
import pytest

from cascademf.analytic_spectrum import JInterval, Phi, tau
from cascademf.cascade import NodeAddress, composed_samples, sample_tree
from cascademf.empirical_spectrum import (CylinderTable, address_points, aggregate_partition_tables, ball_tau,
                                          coarse_spectrum, composed_cylinder_table, cylinder_table, empirical_tau,
                                          minimum_exponent_trend, mu_q_residual_curve, partition_table,
                                          partition_theta, realization_partition_table, sample_mu_q)
from cascademf.exceptions import OutsideJError
from cascademf.weights import WeightModel, preset_model


@pytest.fixture(scope='module')
def binomial_tree():
    return sample_tree(preset_model('binomial'), 10, 0)


@pytest.fixture(scope='module')
def identity_tree():
    return sample_tree(WeightModel.deterministic((0.5, 0.5), (0.5, 0.5), label='identity'), 8, 0)


def test_partition_theta_counts_cylinders(binomial_tree):
    assert partition_theta(binomial_tree, 1, 5, 0.0, 0.0, 3) == pytest.approx(32.0)

    with pytest.raises(ValueError):
        partition_theta(binomial_tree, 1, 8, 1.0, 0.0, 3)


@pytest.mark.parametrize('q,t', [(2.0, 0.5), (-1.0, -0.5), (0.5, 1.0)])
def test_deterministic_theta_is_a_power(binomial_tree, q, t):
    model = binomial_tree.model
    assert partition_theta(binomial_tree, 1, 4, q, t, 3) == pytest.approx(Phi(model, q, t) ** 4, rel=1e-10)


def test_deterministic_roots_equal_tau(binomial_tree):
    q_grid = [-1.0, 0.5, 2.0]
    table = realization_partition_table(binomial_tree, 1, [4, 6], q_grid, 3)
    expected = [tau(binomial_tree.model, q) for q in q_grid]
    for row in table.roots:
        assert row == pytest.approx(np.array(expected), abs=1e-10)
    assert table.levels == (4, 6)
    assert not table.skipped
    assert table.theta(4, 2.0, expected[2]) == pytest.approx(1.0)


def test_empirical_tau_of_deterministic_cascade(binomial_tree):
    q_grid = np.array([-1.0, 0.0, 1.0, 2.0])
    curve = empirical_tau([binomial_tree, binomial_tree], 1, q_grid, [4, 5, 6], 3)
    expected = np.array([-log2(0.3 ** q + 0.7 ** q) for q in q_grid])
    assert curve.tau == pytest.approx(expected, abs=1e-9)
    assert curve.source == 'empirical'
    assert curve.levels_used.tolist() == [3, 3, 3, 3]
    assert np.all(curve.stderr <= 1e-9)

    with pytest.raises(ValueError):
        empirical_tau([], 1, q_grid, [4], 3)
    with pytest.raises(ValueError):
        empirical_tau([binomial_tree], 1, q_grid, [8], 3)


def test_cylinder_table_root_and_skips():
    table = CylinderTable(level=1, m=1, oscillations=np.array([0.5, 0.0]), lengths=np.array([0.5, 0.5]))
    assert table.root(1.0) == pytest.approx(1.0)
    assert np.isnan(table.exponents()[1])

    result = partition_table({1: table}, [-1.0, 1.0], 1)
    assert np.isnan(result.roots[0, 0])
    assert result.roots[0, 1] == pytest.approx(1.0)
    assert len(result.skipped) == 1

    void = CylinderTable(level=1, m=1, oscillations=np.zeros(2), lengths=np.array([0.5, 0.5]))
    assert void.root(1.0) is None
    assert void.log_theta(1.0, 0.0) == -np.inf
    assert partition_table({1: void}, [1.0], 1).skipped[0][2] == 'all-zero partition'


def test_negative_q_below_limit_is_skipped():
    table = CylinderTable(level=1, m=1, oscillations=np.array([0.3, 0.7]), lengths=np.array([0.5, 0.5]))
    result = partition_table({1: table}, [-3.0, -1.0], 1)
    assert np.isnan(result.roots[0, 0])
    assert np.isfinite(result.roots[0, 1])


def test_q_min_moves_the_negative_limit():
    table = CylinderTable(level=1, m=1, oscillations=np.array([0.3, 0.7]), lengths=np.array([0.5, 0.5]))
    result = partition_table({1: table}, [-3.0, -1.0], 1, q_min=-4.0)
    assert np.all(np.isfinite(result.roots))
    assert result.roots[0, 0] == pytest.approx(-log2(0.3 ** -3 + 0.7 ** -3))
    assert not result.skipped


def test_aggregate_single_level():
    table = CylinderTable(level=2, m=1, oscillations=np.array([0.25, 0.25, 0.25, 0.25]),
                          lengths=np.full(4, 0.25))
    curve = aggregate_partition_tables([partition_table({2: table}, [0.0, 1.0, 2.0], 1)])
    assert curve.tau == pytest.approx(np.array([-1.0, 0.0, 1.0]))
    assert curve.tau_prime == pytest.approx(np.array([1.0, 1.0, 1.0]))
    assert any('single usable level' in note for note in curve.notes)


def test_coarse_spectrum_of_binomial(binomial_tree):
    spectrum = coarse_spectrum(binomial_tree, 1, 6, 3, 0.05)
    assert spectrum.void_count == 0
    assert spectrum.counts.sum() == 64
    assert sorted(spectrum.counts.tolist()) == sorted(comb(6, k) for k in range(7))
    assert spectrum.h.min() >= -log2(0.7) - 0.05
    assert spectrum.h.max() <= -log2(0.3) + 0.05
    assert spectrum.mean_length == pytest.approx(2.0 ** -6)
    assert spectrum.d_hat.max() == pytest.approx(log2(20) / 6)

    with pytest.raises(ValueError):
        coarse_spectrum(binomial_tree, 1, 6, 3, 0.0)


def test_coarse_spectrum_of_identity(identity_tree):
    spectrum = coarse_spectrum(identity_tree, 1, 5, 3, 0.05)
    assert spectrum.h.tolist() == [pytest.approx(1.0)]
    assert spectrum.d_hat == pytest.approx(np.array([1.0]))
    assert spectrum.modal_h == pytest.approx(1.0)


def test_minimum_exponent_trend(binomial_tree):
    trend = minimum_exponent_trend([binomial_tree], 1, [4, 6], 3)
    assert trend[4] == pytest.approx(-log2(0.7))
    assert trend[6] == pytest.approx(-log2(0.7))


def test_composed_cylinder_table(binomial_tree):
    samples = composed_samples(binomial_tree, 8)
    table = composed_cylinder_table(samples, 3)
    assert table.oscillations == pytest.approx(np.abs(binomial_tree.products('W', 3)), rel=1e-12)
    assert table.lengths == pytest.approx(np.full(8, 1 / 8))

    with pytest.raises(ValueError):
        composed_cylinder_table(samples, 8, m=2)


def test_mu_q_at_zero_is_uniform(binomial_tree):
    sample = sample_mu_q(binomial_tree, 0.0, 4, 2, draws=16, seed=3)
    assert sample.weights == pytest.approx(np.full(16, 1 / 16))
    assert sample.additivity_residual <= 1e-12
    assert not sample.underflow
    assert len(sample.drawn) == 16
    assert all(address.level == 4 for address in sample.drawn)
    assert sample.rows()[0] == ['0000', pytest.approx(1 / 16)]

    again = sample_mu_q(binomial_tree, 0.0, 4, 2, draws=16, seed=3)
    assert again.drawn == sample.drawn


def test_mu_q_favours_heavy_cylinders(binomial_tree):
    sample = sample_mu_q(binomial_tree, 2.0, 4, 2, draws=4)
    # Q_2(w) is largest on the all-0.7 cylinder
    assert int(np.argmax(sample.weights)) == 15


def test_mu_q_rejections(binomial_tree):
    interval = JInterval(q_lower=-1.0, q_upper=1.0, h_lower=0.6, h_upper=1.6)
    with pytest.raises(OutsideJError):
        sample_mu_q(binomial_tree, 2.0, 4, 2, interval=interval)
    with pytest.raises(ValueError):
        sample_mu_q(binomial_tree, 0.5, 8, 4)


def test_mu_q_residual_curve(binomial_tree):
    curve = mu_q_residual_curve(binomial_tree, 0.0, 3, [1, 2, 3])
    assert [s for s, _ in curve] == [1, 2, 3]
    assert all(residual <= 1e-12 for _, residual in curve)


def test_address_points(identity_tree):
    samples = composed_samples(identity_tree, 4)
    points = address_points(samples, [NodeAddress.parse('01'), NodeAddress.parse('11')])
    assert points == pytest.approx(np.array([0.375, 0.875]))


def test_ball_tau(identity_tree):
    samples = composed_samples(identity_tree, 8)
    estimate = ball_tau(samples, 1.0, 0.0625)
    assert estimate.balls >= 7
    # Eight balls of radius 1/16 tile [0, 1]
    assert estimate.value == pytest.approx(0.0, abs=1e-9)

    with pytest.raises(ValueError):
        ball_tau(samples, 1.0, 0.0)
    with pytest.raises(ValueError):
        ball_tau(samples, 1.0, 0.75)


def test_roots_separate_theta(binomial_tree):
    table = realization_partition_table(binomial_tree, 1, [5], [0.5, 2.0], 3)
    for column, q in enumerate(table.q_grid):
        root = table.roots[0, column]
        assert table.theta(5, q, root - 0.1) < 1.0 < table.theta(5, q, root + 0.1)


def test_ball_discrepancy_is_logged(identity_tree, caplog):
    samples = composed_samples(identity_tree, 8)
    ball_tau(samples, 1.0, 0.0625, reference=0.0)
    assert not caplog.records
    ball_tau(samples, 1.0, 0.0625, reference=1.0)
    assert 'differs from the grid value' in caplog.text


def test_skipped_cells_are_logged(caplog):
    table = CylinderTable(level=1, m=1, oscillations=np.array([0.5, 0.0]), lengths=np.array([0.5, 0.5]))
    aggregate_partition_tables([partition_table({1: table}, [-1.0, 1.0], 1)])
    assert 'Skipped 1' in caplog.text


def test_additivity_residual_shrinks_with_truncation():
    real = sample_tree(preset_model('beta-split'), 10, 8)
    curve = mu_q_residual_curve(real, 2.0, 3, [1, 5])
    assert curve[1][1] <= curve[0][1]
