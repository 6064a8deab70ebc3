"""Tests for the large-time expansions"""

import math

import numpy as np
import pytest

from errors import DomainError, EnvelopeError
from expansion import (DEFAULT_COEFFICIENTS, ExpansionCoefficients, ExpansionTermU, ExpansionTermV,
                       correction_operator, f_term, h_term, u_expansion, u_uniformity,
                       v_expansion_offorigin, v_expansion_origin)
from kernel import KernelQuery, LatticePoint
from specfun import exp_integral_e1, gaussian_derivative
from verify import bounded, fit_decay


def test_default_coefficients():
    assert DEFAULT_COEFFICIENTS.quartic == pytest.approx(1.0 / 12.0)
    assert DEFAULT_COEFFICIENTS.sextic == pytest.approx(1.0 / 360.0)
    assert DEFAULT_COEFFICIENTS.quartic_squared == pytest.approx(1.0 / 288.0)


def test_correction_operators():
    assert correction_operator(0) == {(0, 0): 1.0}
    assert correction_operator(1) == {(4, 0): 1.0 / 12.0, (0, 4): 1.0 / 12.0}
    second = correction_operator(2)
    assert second[(4, 4)] == pytest.approx(2.0 / 288.0)
    assert set(second) == {(6, 0), (0, 6), (8, 0), (4, 4), (0, 8)}
    with pytest.raises(EnvelopeError):
        correction_operator(3)


def test_leading_terms_at_origin():
    assert h_term(0, 0, (0.0, 0.0)) == pytest.approx(1.0 / (4.0 * math.pi), rel=1e-15)
    # d^4/du^4 exp(-u^2/4) at 0 is 3/4
    assert h_term(0, 1, (0.0, 0.0)) == pytest.approx((4.0 / 24.0) * 0.75 / (4.0 * math.pi), rel=1e-14)


def test_first_time_derivative_of_gaussian_is_its_laplacian():
    y = (0.9, -0.4)
    laplacian = gaussian_derivative(2, 0, y) + gaussian_derivative(0, 2, y)
    assert h_term(1, 0, y) == pytest.approx(laplacian, rel=1e-13)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_time_derivative_terms_match_finite_differences(n):
    x = np.array([0.8, -0.5])

    def term(t):
        return t ** -(n + 1) * h_term(0, n, tuple(x / math.sqrt(t)))

    t, h = 1.3, 1e-4
    numeric = (term(t + h) - term(t - h)) / (2.0 * h)
    exact = t ** -(n + 2) * h_term(1, n, tuple(x / math.sqrt(t)))
    assert exact == pytest.approx(numeric, rel=1e-6)


def test_unsupported_derivative_order():
    with pytest.raises(EnvelopeError):
        h_term(2, 0, (0.0, 0.0))


def test_f0_is_an_exponential_integral():
    assert f_term(0, (2.0, 0.0)) == pytest.approx(exp_integral_e1(1.0) / (4.0 * math.pi), rel=1e-15)
    assert f_term(0, (2.0, 0.0)) == pytest.approx(0.017459, abs=1e-6)
    with pytest.raises(DomainError):
        f_term(1, (0.0, 0.0))


@pytest.mark.parametrize("n", [1, 2])
def test_f_terms_integrate_the_h_terms(n):
    x = np.array([1.2, 0.7])

    def term(t):
        return t ** -n * f_term(n, tuple(x / math.sqrt(t)))

    t, h = 1.5, 1e-4
    numeric = (term(t + h) - term(t - h)) / (2.0 * h)
    expected = t ** -(n + 1) * h_term(0, n, tuple(x / math.sqrt(t)))
    assert numeric == pytest.approx(expected, rel=1e-6)


def test_term_objects():
    y = (0.3, 1.1)
    assert ExpansionTermU(1, 1)(y) == pytest.approx(h_term(1, 1, y))
    assert ExpansionTermV(1)(y) == pytest.approx(f_term(1, y))


def test_regime_and_length_checks():
    point = LatticePoint(1, 0)
    with pytest.raises(DomainError):
        u_expansion(KernelQuery(point, 0.5), 1, t0=1.0)
    with pytest.raises(EnvelopeError):
        u_expansion(KernelQuery(point, 10.0), 4, t0=1.0)
    with pytest.raises(EnvelopeError):
        u_expansion(KernelQuery(point, 10.0, 2), 1, t0=1.0)
    with pytest.raises(DomainError):
        v_expansion_offorigin(LatticePoint(0, 0), 10.0, 1, t0=1.0)


def test_report_row_and_order():
    report = u_expansion(KernelQuery(LatticePoint(2, 1), 50.0, 1), 2, t0=1.0)
    row = report.to_row()
    assert row["kind"] == "u"
    assert row["residual"] == pytest.approx(report.exact - report.value)
    assert report.order == 4
    assert len(report.terms) == 2


@pytest.mark.parametrize("N", [1, 2, 3])
def test_u_expansion_decays_at_the_predicted_rate(N):
    times = (40.0, 80.0, 160.0, 320.0)
    reports = [u_expansion(KernelQuery(LatticePoint(0, 0), t), N, t0=1.0) for t in times]
    fit = fit_decay([(r.t, abs(r.residual)) for r in reports])
    assert fit.matches(-(N + 1), 0.15)


def test_sabotaged_coefficient_spoils_the_rate():
    broken = ExpansionCoefficients(quartic=1.0 / math.factorial(4))
    times = (40.0, 80.0, 160.0, 320.0)
    reports = [u_expansion(KernelQuery(LatticePoint(0, 0), t), 2, t0=1.0, coefficients=broken) for t in times]
    fit = fit_decay([(r.t, abs(r.residual)) for r in reports])
    assert fit.slope == pytest.approx(-2.0, abs=0.15)


@pytest.mark.slow
def test_v_expansion_off_origin_needs_omega():
    point = LatticePoint(5, 0)
    times = (160.0, 320.0, 640.0, 1280.0)
    with_omega = [v_expansion_offorigin(point, t, 1, t0=1.0) for t in times]
    without = [v_expansion_offorigin(point, t, 1, t0=1.0, include_omega=False) for t in times]
    assert fit_decay([(r.t, abs(r.residual)) for r in with_omega]).matches(-1.0, 0.15)
    assert abs(without[-1].residual) > 10.0 * abs(with_omega[-1].residual)


@pytest.mark.slow
def test_v_expansion_at_origin_approaches_s0():
    near = v_expansion_origin(1e3, 1.0, 1, t0=1.0)
    far = v_expansion_origin(1e4, 1.0, 1, t0=1.0)
    assert abs(far.residual) <= 1e-4
    assert 5.0 <= abs(near.residual) / abs(far.residual) <= 20.0
    assert far.kind == "v0"
    assert set(far.extras) == {"log", "s0"}


@pytest.mark.parametrize("eps", [1.0, 0.5])
def test_origin_terms_step_by_h_coefficients(eps):
    t = 50.0
    first, second, third = (v_expansion_origin(t, eps, N, t0=1.0) for N in (1, 2, 3))
    h1 = h_term(0, 1, (0.0, 0.0))
    h2 = h_term(0, 2, (0.0, 0.0))
    assert h1 == pytest.approx(0.125 / (4.0 * math.pi), rel=1e-14)
    assert h2 == pytest.approx((10.0 / 256.0) / (4.0 * math.pi), rel=1e-12)
    assert second.value - first.value == pytest.approx(-eps ** 2 * h1 / t, rel=1e-10)
    assert third.value - second.value == pytest.approx(-eps ** 4 * h2 / (2.0 * t ** 2), rel=1e-8)


@pytest.mark.slow
@pytest.mark.parametrize("N", [2, 3])
def test_v_expansion_at_origin_decays_at_the_predicted_rate(N):
    times = (40.0, 80.0, 160.0, 320.0)
    reports = [v_expansion_origin(t, 1.0, N, t0=1.0) for t in times]
    assert fit_decay([(r.t, abs(r.residual)) for r in reports]).matches(-N, 0.15)


@pytest.mark.parametrize("N", [1, 2])
def test_u_expansion_is_uniform_in_x(N):
    sups = [u_uniformity(t, N, t0=1.0) for t in (10.0, 20.0, 40.0, 80.0, 160.0)]
    assert bounded(sups)
    assert all(np.isfinite(sups))
    # the sup over the ball is never below the value at the origin
    origin = u_expansion(KernelQuery(LatticePoint(0, 0), 40.0), N, t0=1.0)
    assert sups[2] >= abs(origin.bound_check) - 1e-12


def test_uniformity_respects_the_regime():
    with pytest.raises(DomainError):
        u_uniformity(0.5, 1, t0=1.0)
