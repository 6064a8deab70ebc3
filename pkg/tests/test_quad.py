"""Tests for the quadrature rules"""

import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from errors import ConvergenceError, DomainError, PreconditionError
from quad import (FIXED, GAUSS_LEGENDRE_1D, POLAR_PRODUCT, OscillatoryEnvelope, PolarDomain,
                  QuadratureSpec, gauss_legendre, integrate_geometric, integrate_interval,
                  integrate_panels, integrate_periodic_2d, integrate_polar, oscillatory_tail,
                  periodic_2d_result, refine, semi_infinite_integral, square_boundary)
from specfun import bessel_j, hankel_envelope


def test_spec_rejects_unknown_rule():
    with pytest.raises(PreconditionError):
        QuadratureSpec(rule="simpson")
    with pytest.raises(PreconditionError):
        QuadratureSpec(resolution=1)


@pytest.mark.parametrize("resolution", [2, 4, 12, 48])
def test_doubling_needs_nested_grids(resolution):
    with pytest.raises(PreconditionError):
        QuadratureSpec(resolution=resolution)
    assert QuadratureSpec(resolution=resolution, refinement=FIXED).resolution == resolution


def test_at_least_rounds_up_by_doubling():
    spec = QuadratureSpec(resolution=32).at_least(100)
    assert spec.resolution == 128
    assert QuadratureSpec(resolution=64).at_least(10).resolution == 64


def test_refine_stops_at_tolerance():
    spec = QuadratureSpec(rule=GAUSS_LEGENDRE_1D, resolution=8, tolerance=1e-10)
    result = refine(lambda n: 1.0 + 2.0 ** -n, spec)
    assert result.value == pytest.approx(1.0, abs=1e-10)
    assert result.error <= 1e-10
    assert result.history


def test_refine_gives_up_with_estimates():
    spec = QuadratureSpec(resolution=8, max_resolution=64)
    with pytest.raises(ConvergenceError) as info:
        refine(lambda n: 100.0 + n, spec)
    assert info.value.estimates == (132.0, 164.0)


def test_fixed_refinement_evaluates_once():
    calls = []
    spec = QuadratureSpec(resolution=8, refinement=FIXED)
    result = refine(lambda n: calls.append(n) or 3.0, spec)
    assert calls == [8]
    assert math.isnan(result.error)


def test_gauss_legendre_is_exact_for_polynomials():
    assert gauss_legendre(lambda x: x ** 7 - 3 * x ** 2, -1.0, 2.0, 8) == pytest.approx(
        (2.0 ** 8 - 1.0) / 8.0 - (8.0 + 1.0), rel=1e-14)


def test_panels_and_interval_rules():
    assert integrate_panels(np.sin, 0.0, 10.0 * math.pi) == pytest.approx(0.0, abs=1e-13)
    assert integrate_panels(np.exp, 0.0, 3.0, 0.5) == pytest.approx(math.expm1(3.0), rel=1e-14)
    assert integrate_panels(np.exp, 1.0, 1.0) == 0.0
    assert integrate_interval(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0) == pytest.approx(math.pi / 4, rel=1e-13)


def test_geometric_panels_handle_slow_decay():
    value = integrate_geometric(lambda t: 1.0 / (1.0 + t) ** 2, 100.0)
    assert value == pytest.approx(1.0 - 1.0 / 101.0, rel=1e-12)
    assert integrate_geometric(np.exp, 0.0) == 0.0
    with pytest.raises(DomainError):
        integrate_geometric(np.exp, -1.0)


def test_periodic_trapezoid_is_spectrally_accurate():
    value = integrate_periodic_2d(lambda a, b: np.exp(np.cos(a) + np.cos(b)))
    assert value == pytest.approx((2.0 * math.pi * special.i0(1.0)) ** 2, rel=1e-13)


def test_periodic_result_reports_resolution():
    result = periodic_2d_result(lambda a, b: np.cos(a) ** 2 + 0.0 * b)
    assert result.value == pytest.approx(2.0 * math.pi ** 2, rel=1e-13)
    assert result.resolution >= 64


def test_square_boundary():
    assert square_boundary(0.0) == pytest.approx(math.pi)
    assert square_boundary(math.pi / 4) == pytest.approx(math.pi * math.sqrt(2.0))


@pytest.mark.parametrize(
    "domain, area",
    [
        (PolarDomain.disc(2.0), 4.0 * math.pi),
        (PolarDomain.square(), 4.0 * math.pi ** 2),
        (PolarDomain.square_minus_disc(), 4.0 * math.pi ** 2 - math.pi ** 3),
    ],
)
def test_polar_areas(domain, area):
    spec = QuadratureSpec(rule=POLAR_PRODUCT, resolution=16, tolerance=1e-13)
    assert integrate_polar(lambda rho, phi: np.ones_like(rho), domain, spec) == pytest.approx(area, rel=1e-12)


def test_polar_rule_applies_the_jacobian():
    value = integrate_polar(lambda rho, phi: rho * rho, PolarDomain.disc(1.0))
    assert value == pytest.approx(0.5 * math.pi, rel=1e-13)


def test_disc_needs_positive_radius():
    with pytest.raises(DomainError):
        PolarDomain.disc(0.0)


def test_oscillatory_tail_against_scipy():
    envelope = OscillatoryEnvelope(terms=((1.0, 2.0, 0.0),))
    expected, _ = quad(lambda z: z ** -2.0, 50.0, np.inf, weight="cos", wvar=1.0, epsabs=1e-13)
    assert oscillatory_tail(envelope, 50.0) == pytest.approx(expected, abs=1e-10)


def test_oscillatory_tail_refuses_small_start():
    with pytest.raises(DomainError):
        oscillatory_tail(hankel_envelope(3), 5.0)


def test_divided_envelope_shifts_powers():
    envelope = OscillatoryEnvelope(terms=((2.0, 0.5, 1.0),)).divided_by_power(1.0)
    assert envelope.terms == ((2.0, 1.5, 1.0),)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_bessel_integrates_to_one(n):
    value = semi_infinite_integral(lambda z: bessel_j(n, z), hankel_envelope(n, 6), 0.0)
    assert value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("tau", [1.0, 4.0])
def test_refinement_error_does_not_grow(tau):
    spec = QuadratureSpec(resolution=8, tolerance=1e-12)
    result = periodic_2d_result(lambda a, b: np.exp(-tau * (4.0 - 2.0 * np.cos(a) - 2.0 * np.cos(b))), spec)
    assert len(result.history) >= 2
    assert all(later <= earlier for earlier, later in zip(result.history, result.history[1:]))
    assert result.value == pytest.approx((2.0 * math.pi * special.ive(0, 2.0 * tau)) ** 2, rel=1e-12)


def test_polar_and_cartesian_routes_agree():
    # the Gaussian is below 1e-17 outside the disc of radius pi
    def g(rho):
        return np.exp(-4.0 * rho * rho)

    polar = integrate_polar(lambda rho, phi: g(rho), PolarDomain.disc(math.pi),
                            QuadratureSpec(rule=POLAR_PRODUCT, resolution=16, tolerance=1e-12))
    cartesian = integrate_periodic_2d(lambda a, b: g(np.sqrt(a * a + b * b)),
                                      QuadratureSpec(resolution=16, tolerance=1e-12))
    assert polar == pytest.approx(cartesian, abs=1e-11)
    assert polar == pytest.approx(0.25 * math.pi * -math.expm1(-4.0 * math.pi ** 2), rel=1e-12)


def test_bessel_tail_decays_like_inverse_square_root():
    # start points where sin(z0 - pi/4) = 1, so |tail| follows its envelope
    starts = [0.75 * math.pi + round((z - 0.75 * math.pi) / math.pi) * math.pi for z in (1e2, 1e3, 1e4)]
    tails = [abs(oscillatory_tail(hankel_envelope(0), z0)) for z0 in starts]
    slope = np.polyfit(np.log(starts), np.log(tails), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.02)
    assert tails[-1] < tails[0]
