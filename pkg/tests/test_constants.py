"""Tests for S0 and its parts"""

import math

import pytest
from scipy.integrate import quad

from constants import (boundary_integral, gaussian_pair, r_pi, s0_quadrature, symbol_integral_square,
                       symbol_integral_unit_disc)
from errors import DomainError
from specfun import euler_gamma


def _ray_march(phi):
    lo, hi = 0.0, 10.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if max(abs(mid * math.cos(phi)), abs(mid * math.sin(phi))) <= math.pi:
            lo = mid
        else:
            hi = mid
    return lo


@pytest.mark.parametrize("phi", [0.0, 0.3, math.pi / 4, 2.0, -1.1])
def test_r_pi_against_bisection(phi):
    assert r_pi(phi) == pytest.approx(_ray_march(phi), abs=1e-12)


def test_r_pi_rejects_non_finite_angles():
    with pytest.raises(DomainError):
        r_pi(float("nan"))


def test_boundary_integral_closed_path():
    log_cos, _ = quad(lambda phi: math.log(math.cos(phi)), 0.0, 0.25 * math.pi, epsabs=1e-14)
    expected = 2.0 * math.pi * math.log(math.pi) - 8.0 * log_cos
    assert boundary_integral() == pytest.approx(expected, abs=1e-12)


def test_gaussian_pair_is_pi_gamma():
    assert gaussian_pair() == pytest.approx(math.pi * euler_gamma(), abs=1e-10)


def test_symbol_integrals_are_positive():
    square = symbol_integral_square()
    disc = symbol_integral_unit_disc()
    assert 0.0 < disc < square


def test_s0_breakdown():
    s0 = s0_quadrature()
    assert s0.total == pytest.approx(
        (s0.gamma_part + s0.symbol_part + s0.boundary_part) / (2.0 * math.pi) ** 2, rel=1e-15)
    assert abs(s0.total - s0.total_gaussian_route) <= 1e-8
    assert s0.symbol_sign == "positive"
    data = s0.to_dict()
    for key in ("gamma_part", "symbol_part", "boundary_part", "total"):
        assert isinstance(data[key], float)
