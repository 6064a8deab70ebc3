"""Tests for the exact lattice heat kernel"""

import math

import numpy as np
import pytest
from scipy import special
from scipy.integrate import quad

from errors import DomainError, PreconditionError
from kernel import (KERNEL_COLUMNS, SPECTRAL, KernelQuery, LatticePoint, evaluate_batch, heat_residual_patch,
                    heat_residuals, lattice_delta, product_patch, route_rows, spectral_patch, symbol_A,
                    symbol_difference, time_integral_patch, total_mass, u_exact, u_product_scaled, u_routes,
                    v_exact, v_time_integral_scaled)


def test_lattice_point_geometry():
    point = LatticePoint(3, 4, 0.5)
    assert point.x == (1.5, 2.0)
    assert point.r == pytest.approx(2.5)
    assert point.psi == pytest.approx(math.atan2(4, 3))
    assert not point.is_origin
    assert len(LatticePoint(2, 1).images()) == 8
    assert len(LatticePoint(2, 2).images()) == 4


def test_invalid_points_and_queries():
    with pytest.raises(DomainError):
        LatticePoint(1, 0, 0.0)
    with pytest.raises(DomainError):
        LatticePoint(1.5, 0)
    with pytest.raises(DomainError):
        KernelQuery(LatticePoint(0, 0), -1.0)
    with pytest.raises(DomainError):
        KernelQuery(LatticePoint(0, 0), 0.0, J=1)


def test_delta_at_time_zero():
    assert u_exact(KernelQuery(LatticePoint(0, 0), 0.0)) == 1.0
    assert u_exact(KernelQuery(LatticePoint(0, 0, 0.5), 0.0)) == 4.0
    assert u_exact(KernelQuery(LatticePoint(1, 0), 0.0)) == 0.0
    assert lattice_delta(LatticePoint(0, 0, 0.25)) == 16.0


def test_symbol_A():
    assert symbol_A((0.0, 0.0)) == 0.0
    assert symbol_A((math.pi, math.pi)) == pytest.approx(8.0)
    theta = (0.3, -1.2)
    assert symbol_A(theta) == pytest.approx(2.0 * (2.0 - math.cos(0.3) - math.cos(1.2)), rel=1e-15)


def test_symbol_difference_is_stable_near_origin():
    assert symbol_difference(1e-6, 0.0) == pytest.approx(1.0 / 12.0, rel=1e-6)
    assert symbol_difference(1e-5, 1e-5) == pytest.approx(1.0 / 24.0, rel=1e-6)
    theta1, theta2 = 1.1, -2.3
    naive = 1.0 / symbol_A((theta1, theta2)) - 1.0 / (theta1 ** 2 + theta2 ** 2)
    assert symbol_difference(theta1, theta2) == pytest.approx(naive, rel=1e-13)


def test_product_route_matches_scipy():
    tau = 3.7
    expected = special.ive(2, 2 * tau) * special.ive(3, 2 * tau)
    assert u_product_scaled(2, -3, tau) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("s1, s2, t, J", [(0, 0, 1.0, 0), (2, 1, 5.0, 0), (3, 3, 0.5, 1), (1, 0, 20.0, 1)])
def test_routes_agree(s1, s2, t, J):
    routes = u_routes(KernelQuery(LatticePoint(s1, s2), t, J))
    assert routes.abs_diff < 1e-12
    assert routes.spectral == pytest.approx(routes.product, abs=1e-12)


def test_scaling_with_eps():
    value = u_exact(KernelQuery(LatticePoint(1, 2, 0.5), 1.0))
    assert value == pytest.approx(4.0 * u_product_scaled(1, 2, 4.0), rel=1e-15)
    derivative = u_exact(KernelQuery(LatticePoint(1, 2, 0.5), 1.0, 1))
    assert derivative == pytest.approx(16.0 * u_product_scaled(1, 2, 4.0, 1), rel=1e-15)


def test_unknown_route():
    with pytest.raises(PreconditionError):
        u_exact(KernelQuery(LatticePoint(0, 0), 1.0), route="fourier")


def test_symmetry_of_the_square():
    query = KernelQuery(LatticePoint(3, 1), 4.0)
    value = u_exact(query)
    for image in query.point.images():
        assert u_exact(KernelQuery(image, 4.0)) == pytest.approx(value, rel=1e-14)


def test_mass_is_conserved():
    assert total_mass(2.0, 30) == pytest.approx(1.0, abs=1e-12)
    assert total_mass(0.0, 3) == pytest.approx(1.0, abs=1e-15)


def test_spectral_patch_matches_product_patch():
    tau = 3.0
    assert np.allclose(spectral_patch(tau, 4), product_patch(tau, 4), atol=1e-12)


def test_v_routes_agree():
    point = LatticePoint(2, 1)
    assert v_exact(point, 12.0) == pytest.approx(v_exact(point, 12.0, route=SPECTRAL), abs=1e-9)


def test_time_integral_against_scipy():
    expected, _ = quad(lambda x: special.ive(0, 2 * x) ** 2, 0.0, 5.0, epsabs=1e-14, epsrel=1e-13)
    assert v_time_integral_scaled(0, 0, 5.0) == pytest.approx(expected, rel=1e-11)


def test_v_at_time_zero_and_negative_time():
    assert v_exact(LatticePoint(0, 0), 0.0) == 0.0
    with pytest.raises(DomainError):
        v_exact(LatticePoint(0, 0), -1.0)


@pytest.mark.parametrize("s1, s2, eps", [(0, 0, 1.0), (1, 0, 1.0), (2, 1, 0.5)])
def test_heat_equation_holds(s1, s2, eps):
    u_residual, v_residual = heat_residuals(LatticePoint(s1, s2, eps), 2.0)
    assert abs(u_residual) < 1e-8
    assert abs(v_residual) < 1e-8


def test_batch_keeps_order():
    queries = [KernelQuery(LatticePoint(k, 0), 1.0 + k) for k in range(6)]
    sequential = evaluate_batch(queries)
    assert evaluate_batch(queries, workers=3) == sequential
    assert sequential == [u_exact(q) for q in queries]


@pytest.mark.parametrize("tau", [0.5, 12.0])
def test_time_integral_patch_matches_single_sites(tau):
    patch = time_integral_patch(tau, 6)
    for s1, s2 in ((0, 0), (2, 1), (-3, 5), (6, -6)):
        assert patch[s1 + 6, s2 + 6] == pytest.approx(v_time_integral_scaled(s1, s2, tau), abs=1e-12)
    assert np.array_equal(time_integral_patch(0.0, 3), np.zeros((7, 7)))


def test_time_integral_patch_matches_the_spectral_patch():
    tau = 8.0
    assert np.allclose(time_integral_patch(tau, 20), spectral_patch(tau, 20, kind="v"), rtol=0.0, atol=1e-10)


@pytest.mark.parametrize("t, eps", [(0.5, 1.0), (2.0, 0.5), (10.0, 1.0)])
def test_heat_equation_holds_over_the_whole_patch(t, eps):
    u_residual, v_residual = heat_residual_patch(t, 20, eps)
    assert u_residual.shape == v_residual.shape == (41, 41)
    assert np.max(np.abs(u_residual)) < 1e-8
    assert np.max(np.abs(v_residual)) < 1e-8


def test_heat_residual_patch_needs_positive_time():
    with pytest.raises(DomainError):
        heat_residual_patch(0.0, 4)


def test_route_rows_keep_order_and_columns():
    queries = [KernelQuery(LatticePoint(k, 1 - k, 0.5), 0.5 * (k + 1)) for k in range(5)]
    rows = route_rows(queries, workers=2)
    assert [tuple(row) for row in rows] == [KERNEL_COLUMNS] * 5
    assert [(row["s1"], row["t"]) for row in rows] == [(q.point.s1, q.t) for q in queries]
    assert rows == route_rows(queries)
    for row, query in zip(rows, queries):
        assert row["value_product"] == u_exact(query)
        assert row["abs_diff"] < 1e-12
