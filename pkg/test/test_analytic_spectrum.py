# pylint: skip-file
from math import log2

import numpy as np
import pytest

from cascademf.analytic_spectrum import (JInterval, Phi, dimension_gap, full_spectrum_curve, full_tau_m,
                                         interval_J, left_sided_check, legendre, legendre_parametric,
                                         predicted_tau_G, smooth_addend_root, spectrum_curve, tau, tau_prime)
from cascademf.exceptions import NoBracketError
from cascademf.weights import preset_model


@pytest.fixture(scope='module')
def binomial():
    return preset_model('binomial')


@pytest.fixture(scope='module')
def binomial_interval(binomial):
    return interval_J(binomial)


def binomial_tau(q):
    return -log2(0.3 ** q + 0.7 ** q)


def test_phi(binomial):
    assert Phi(binomial, 1.0, 0.0) == pytest.approx(1.0)
    assert Phi(binomial, 2.0, 0.0) == pytest.approx(0.58)
    assert Phi(binomial, 0.0, -1.0) == pytest.approx(1.0)


@pytest.mark.parametrize('q', np.linspace(-4, 4, 81))
def test_binomial_closed_form(binomial, q):
    assert tau(binomial, q) == pytest.approx(binomial_tau(q), abs=1e-10)


def test_binomial_reference_values(binomial):
    assert tau(binomial, 2.0) == pytest.approx(0.785875, abs=1e-6)
    assert tau(binomial, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert tau_prime(binomial, 0.0) == pytest.approx(1.12577, abs=1e-5)


@pytest.mark.parametrize('q', [-3.0, -0.5, 0.0, 1.5, 4.0])
def test_monofractal_closed_form(q):
    assert tau(preset_model('monofractal'), q) == pytest.approx(q / 2 - 1, abs=1e-10)


def test_beta_split_closed_form():
    # E B^q = 6 / ((q + 2)(q + 3)) for a Beta(2, 2) split
    model = preset_model('beta-split')
    assert tau(model, 2.0) == pytest.approx(log2(20 / 12), abs=1e-9)
    assert tau(model, 1.0) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize('name,q', [('binomial', 1.5), ('binomial', -2.0), ('beta-split', 0.7),
                                    ('uniform-phase', 2.5), ('critical', 1.2)])
def test_tau_prime_matches_finite_differences(name, q):
    model = preset_model(name)
    step = 1e-5
    numeric = (tau(model, q + step) - tau(model, q - step)) / (2 * step)
    assert tau_prime(model, q) == pytest.approx(numeric, abs=1e-6)


def test_tau_diverges_for_heavy_log_at_negative_q():
    with pytest.raises(NoBracketError):
        tau(preset_model('heavy-log'), -0.5)


def test_dimension_gap_at_zero(binomial):
    assert dimension_gap(binomial, 0.0) == pytest.approx(1.0)
    assert dimension_gap(preset_model('beta-split'), 0.0) == pytest.approx(1.0)


def test_unbounded_intervals(binomial_interval):
    assert not binomial_interval.upper_bounded
    assert not binomial_interval.lower_bounded
    assert binomial_interval.h_lower == pytest.approx(-log2(0.7), abs=1e-3)

    monofractal = interval_J(preset_model('monofractal'))
    assert monofractal.q_upper == np.inf
    assert monofractal.q_lower == -np.inf


def test_cantor_interval_is_bounded_above():
    model = preset_model('cantor')
    interval = interval_J(model)
    assert interval.upper_bounded
    assert abs(interval.residual_upper) <= 1e-10
    assert interval.h_lower == pytest.approx(tau_prime(model, interval.q_upper))

    # The linear continuation meets tau at q_upper
    q_upper = interval.q_upper
    assert full_tau_m(model, q_upper, interval) == pytest.approx(tau(model, q_upper), abs=1e-9)
    assert full_tau_m(model, q_upper + 5, interval) == pytest.approx(interval.h_lower * (q_upper + 5))


def test_heavy_log_interval_stops_at_domain_edge():
    model = preset_model('heavy-log')
    interval = interval_J(model)
    assert interval.q_lower == 0.0
    assert interval.lower_is_domain_edge
    assert np.isnan(full_tau_m(model, -1.0, interval))


def test_interval_helpers():
    interval = JInterval(q_lower=-1.0, q_upper=2.0, h_lower=0.5, h_upper=1.5)
    assert tuple(interval) == (-1.0, 2.0, 0.5, 1.5)
    assert interval.to_dict()['lower_is_domain_edge'] is False


def test_spectrum_curve(binomial, binomial_interval):
    curve = spectrum_curve(binomial, [-1.0, 0.0, 1.0, 2.0], binomial_interval)
    assert curve.tau == pytest.approx(np.array([binomial_tau(q) for q in curve.q]), abs=1e-10)
    assert curve.in_j.all()
    assert not curve.linearized.any()
    assert curve.rows()[2][:2] == [1.0, pytest.approx(0.0, abs=1e-12)]

    heavy = spectrum_curve(preset_model('heavy-log'), [-1.0, 0.5])
    assert np.isnan(heavy.tau[0])
    assert not heavy.in_j[0]


def test_full_spectrum_curve_beyond_interval():
    model = preset_model('cantor')
    interval = interval_J(model)
    grid = np.array([0.0, 1.0, interval.q_upper + 1.0])
    curve = full_spectrum_curve(model, grid, interval)
    assert curve.linearized.tolist() == [False, False, True]
    assert curve.tau_prime[-1] == interval.h_lower


def test_legendre_maximum(binomial, binomial_interval):
    curve = spectrum_curve(binomial, np.linspace(-6, 6, 241), binomial_interval)
    peak = tau_prime(binomial, 0.0)
    pair = legendre(curve, [0.6, peak, 1.6])
    assert pair.tau_star.max() == pytest.approx(-tau(binomial, 0.0), abs=1e-9)
    assert pair.support[0] <= peak <= pair.support[1]


def test_legendre_parametric(binomial):
    pair = legendre_parametric(binomial, np.linspace(-4, 4, 33))
    assert np.all(np.diff(pair.h) >= 0)
    assert pair.tau_star.max() == pytest.approx(1.0)
    assert np.all(pair.tau_star >= -1e-12)


def test_smooth_addend_root():
    assert smooth_addend_root(preset_model('binomial'), 1) == pytest.approx(1.0, abs=1e-9)
    assert smooth_addend_root(preset_model('monofractal'), 1) == 0.0


def test_predicted_tau_g(binomial):
    assert predicted_tau_G(binomial, 1, 0.5) == pytest.approx(-0.5)
    assert predicted_tau_G(binomial, 1, 2.0) == pytest.approx(binomial_tau(2.0))
    for q in (0.25, 0.75, 1.5, 3.0):
        expected = min(binomial_tau(q), q - 1.0)
        assert predicted_tau_G(binomial, 1, q, q_m=1.0) == pytest.approx(expected, abs=1e-9)

    with pytest.raises(ValueError):
        predicted_tau_G(binomial, 1, -0.5)


def test_left_sided_check():
    slope, threshold, passed = left_sided_check(preset_model('heavy-log'))
    assert passed
    assert slope > threshold

    assert left_sided_check(preset_model('binomial')) is None


@pytest.mark.parametrize('name', ['binomial', 'critical', 'cantor', 'beta-split', 'uniform-phase'])
def test_root_residuals(name):
    model = preset_model(name)
    for q in (-1.0, 0.0, 0.5, 2.0, 5.0):
        assert abs(Phi(model, q, tau(model, q)) - 1.0) <= 1e-12


def test_legendre_duality(binomial, binomial_interval):
    q_grid = np.linspace(-3, 3, 61)
    curve = spectrum_curve(binomial, q_grid, binomial_interval)
    for q in (-2.0, -0.5, 0.5, 2.5):
        slope = tau_prime(binomial, q)
        pair = legendre(curve, [slope])
        assert pair.tau_star[0] == pytest.approx(q * slope - tau(binomial, q), abs=1e-9)


@pytest.mark.parametrize('name,affine', [('monofractal', True), ('binomial', False), ('cantor', False)])
def test_affine_tau_iff_monofractal(name, affine):
    model = preset_model(name)
    values = np.array([tau(model, q) for q in np.linspace(-2, 4, 25)])
    second = np.abs(np.diff(values, 2)).max()
    assert bool(second <= 1e-9) == affine
