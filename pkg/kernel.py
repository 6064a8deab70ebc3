#!/usr/bin/env python3
"""
Exact discrete heat kernel u_eps and its time integral v_eps on the lattice eps*Z^2.

Every quantity is computed at eps = 1 in lattice units (s, tau = t/eps^2)
and rescaled:

    d^J u_eps / dt^J (x, t) = eps^(-2(J+1)) d^J u_1 / dtau^J (s, tau)
    v_eps(x, t)             = v_1(s, tau)

u_1 has two independent routes: the Fourier integral over [-pi, pi)^2 with
the symbol A(theta) = 2(2 - cos theta1 - cos theta2) (SPECTRAL), and the
closed product e^{-4 tau} I_|s1|(2 tau) I_|s2|(2 tau) (PRODUCT).
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from errors import DomainError, PreconditionError
from quad import (GAUSS_LEGENDRE_1D, PERIODIC_2D, QuadratureSpec, geometric_nodes, integrate_geometric,
                  integrate_periodic_2d, refine)
from specfun import bessel_i_table

logger = logging.getLogger(__name__)

PRODUCT = "product"
SPECTRAL = "spectral"
TIME_INTEGRAL = "time-integral"
U_ROUTES = (PRODUCT, SPECTRAL)
V_ROUTES = (TIME_INTEGRAL, SPECTRAL)

KERNEL_COLUMNS = ("s1", "s2", "eps", "t", "J", "value_spectral", "value_product", "abs_diff")


@dataclass(frozen=True)
class LatticePoint:
    s1: int
    s2: int
    eps: float = 1.0

    def __post_init__(self):
        if int(self.s1) != self.s1 or int(self.s2) != self.s2:
            raise DomainError(f"lattice indices must be integers, got ({self.s1}, {self.s2})")
        if not self.eps > 0:
            raise DomainError(f"lattice spacing must be positive, got {self.eps}")
        object.__setattr__(self, "s1", int(self.s1))
        object.__setattr__(self, "s2", int(self.s2))

    @property
    def x(self):
        return (self.eps * self.s1, self.eps * self.s2)

    @property
    def r(self):
        return self.eps * math.hypot(self.s1, self.s2)

    @property
    def psi(self):
        return math.atan2(self.s2, self.s1)

    @property
    def is_origin(self):
        return self.s1 == 0 and self.s2 == 0

    def shifted(self, d1, d2):
        return LatticePoint(self.s1 + d1, self.s2 + d2, self.eps)

    def images(self):
        """The eight images under the symmetry group of the square."""
        a, b = self.s1, self.s2
        pairs = {(a, b), (-a, b), (a, -b), (-a, -b), (b, a), (-b, a), (b, -a), (-b, -a)}
        return [LatticePoint(p, q, self.eps) for p, q in sorted(pairs)]


@dataclass(frozen=True)
class KernelQuery:
    point: LatticePoint
    t: float
    J: int = 0

    def __post_init__(self):
        if not self.t >= 0:
            raise DomainError(f"time must be non-negative, got {self.t}")
        if int(self.J) != self.J or self.J < 0:
            raise DomainError(f"derivative order J must be a non-negative integer, got {self.J}")
        if self.t == 0 and self.J > 0:
            raise DomainError("time derivatives are undefined at t = 0")

    @property
    def tau(self):
        return self.t / self.point.eps ** 2


class KernelRoutes(NamedTuple):
    spectral: float
    product: float
    abs_diff: float


def symbol_A(xi):
    """A(xi) = 2(2 - cos xi1 - cos xi2), written as 4(sin^2 + sin^2) to avoid cancellation near 0."""
    s1 = np.sin(0.5 * np.asarray(xi[0], dtype=float))
    s2 = np.sin(0.5 * np.asarray(xi[1], dtype=float))
    value = 4.0 * (s1 * s1 + s2 * s2)
    return float(value) if value.ndim == 0 else value


def _chord_deficit(theta):
    """theta - 2 sin(theta/2)."""
    theta = np.asarray(theta, dtype=float)
    t2 = theta * theta
    series = theta * t2 * (1.0 / 24.0 - t2 * (1.0 / 1920.0 - t2 * (1.0 / 322560.0 - t2 / 92897280.0)))
    return np.where(np.abs(theta) < 0.1, series, theta - 2.0 * np.sin(0.5 * theta))


def symbol_deficit(theta1, theta2):
    """|theta|^2 - A(theta) >= 0, without cancellation."""
    d1 = _chord_deficit(theta1) * (theta1 + 2.0 * np.sin(0.5 * np.asarray(theta1)))
    d2 = _chord_deficit(theta2) * (theta2 + 2.0 * np.sin(0.5 * np.asarray(theta2)))
    return d1 + d2


def symbol_difference(theta1, theta2):
    """D0(theta) = 1/A(theta) - 1/|theta|^2 for theta != 0."""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    rho2 = theta1 * theta1 + theta2 * theta2
    return symbol_deficit(theta1, theta2) / (symbol_A((theta1, theta2)) * rho2)


def lattice_delta(point):
    """delta_eps(x): eps^-2 at the origin, zero elsewhere."""
    return point.eps ** -2 if point.is_origin else 0.0


# --- PRODUCT route --------------------------------------------------------------

def _second_difference(rows):
    # (D c)_n = c_{n-1} + c_{n+1} - 2 c_n, with c_{-1} = c_1
    out = np.empty_like(rows[:-1])
    out[0] = 2.0 * (rows[1] - rows[0])
    out[1:] = rows[:-2] + rows[2:] - 2.0 * rows[1:-1]
    return out


def u_product_scaled(s1, s2, tau, J=0):
    """d^J/dtau^J u_1(s, tau) from scaled modified Bessel functions (tau scalar or array).

    With w_n(tau) = e^{-2 tau} I_n(2 tau), u_1 = w_|s1| w_|s2| and
    dw_n/dtau = w_{n-1} + w_{n+1} - 2 w_n.
    """
    a, b = abs(int(s1)), abs(int(s2))
    tau = np.asarray(tau, dtype=float)
    n_max = max(a, b) + J + 1
    derivatives = [bessel_i_table(n_max, 2.0 * tau)]
    for _ in range(J):
        derivatives.append(_second_difference(derivatives[-1]))
    value = sum(math.comb(J, k) * derivatives[k][a] * derivatives[J - k][b] for k in range(J + 1))
    return float(value) if value.ndim == 0 else value


def product_patch(tau, radius):
    """u_1(s, tau) for all |s|_inf <= radius, indexed [s1 + radius, s2 + radius]."""
    w = bessel_i_table(radius, 2.0 * float(tau))
    line = np.concatenate([w[:0:-1], w])
    return np.outer(line, line)


def total_mass(tau, radius):
    """Sum of u_1(., tau) over the box |s|_inf <= radius."""
    return float(np.sum(product_patch(tau, radius)))


# --- SPECTRAL route -------------------------------------------------------------

def _spectral_spec(spec, s1, s2):
    spec = spec or QuadratureSpec(rule=PERIODIC_2D, resolution=32, tolerance=1e-13)
    # start above the Nyquist limit of the oscillation cos(s . theta)
    return spec.at_least(2 * (abs(s1) + abs(s2)) + 16)


def u_spectral_scaled(s1, s2, tau, J=0, spec=None):
    """(1/(2pi)^2) int (-A)^J e^{-tau A} cos(s . theta) dtheta over [-pi, pi)^2."""

    def integrand(t1, t2):
        a = symbol_A((t1, t2))
        return (-a) ** J * np.exp(-tau * a) * np.cos(s1 * t1 + s2 * t2)

    return integrate_periodic_2d(integrand, _spectral_spec(spec, s1, s2)) / (2.0 * math.pi) ** 2


def _v_symbol(a, tau):
    # (1 - e^{-tau A}) / A, equal to tau at A = 0
    safe = np.where(a > 0, a, 1.0)
    return np.where(a > 0, -np.expm1(-tau * safe) / safe, tau)


def v_spectral_scaled(s1, s2, tau, spec=None):
    """(1/(2pi)^2) int (1 - e^{-tau A})/A cos(s . theta) dtheta over [-pi, pi)^2."""

    def integrand(t1, t2):
        return _v_symbol(symbol_A((t1, t2)), tau) * np.cos(s1 * t1 + s2 * t2)

    return integrate_periodic_2d(integrand, _spectral_spec(spec, s1, s2)) / (2.0 * math.pi) ** 2


def spectral_patch(tau, radius, J=0, kind="u", spec=None):
    """SPECTRAL values at every |s|_inf <= radius from one FFT per resolution.

    The trapezoid sum over theta_j = -pi + 2 pi j / n equals
    (-1)^(s1+s2) * ifft2(g)[s1 mod n, s2 mod n].
    """
    if kind not in ("u", "v"):
        raise PreconditionError(f"kind must be 'u' or 'v', got {kind!r}")
    spec = (spec or QuadratureSpec(rule=PERIODIC_2D, resolution=32, tolerance=1e-13)).at_least(4 * radius + 16)
    offsets = np.arange(-radius, radius + 1)
    signs = np.where(offsets % 2 == 0, 1.0, -1.0)

    def evaluate(n):
        theta = -math.pi + 2.0 * math.pi * np.arange(n) / n
        a = symbol_A((theta[:, None], theta[None, :]))
        g = _v_symbol(a, tau) if kind == "v" else (-a) ** J * np.exp(-tau * a)
        transformed = np.fft.ifft2(g).real
        block = transformed[np.ix_(offsets % n, offsets % n)]
        return block * np.outer(signs, signs)

    return refine(evaluate, spec, "spectral patch").value


# --- public evaluation ----------------------------------------------------------

def u_exact(query, route=PRODUCT, spec=None):
    """d^J u_eps / dt^J at (x, t) by the chosen route."""
    if route not in U_ROUTES:
        raise PreconditionError(f"unknown route {route!r}; choose from {U_ROUTES}")
    point = query.point
    if query.t == 0:
        return lattice_delta(point)
    if route == PRODUCT:
        value = u_product_scaled(point.s1, point.s2, query.tau, query.J)
    else:
        value = u_spectral_scaled(point.s1, point.s2, query.tau, query.J, spec)
    return point.eps ** (-2 * (query.J + 1)) * value


def u_routes(query, spec=None):
    """Both routes and their absolute difference."""
    spectral = u_exact(query, SPECTRAL, spec)
    product = u_exact(query, PRODUCT)
    return KernelRoutes(spectral, product, abs(spectral - product))


def v_time_integral_scaled(s1, s2, tau, spec=None):
    """v_1(s, tau) = int_0^tau u_1(s, tau') dtau' on graded Gauss-Legendre panels."""
    spec = spec or QuadratureSpec(rule=GAUSS_LEGENDRE_1D, resolution=16, tolerance=1e-13)
    return refine(
        lambda n: integrate_geometric(lambda x: u_product_scaled(s1, s2, x), tau, order=n),
        spec,
        "time integral",
    ).value


def time_integral_patch(tau, radius, spec=None):
    """v_1(s, tau) for all |s|_inf <= radius by the time-integral rule, indexed like product_patch."""
    spec = spec or QuadratureSpec(rule=GAUSS_LEGENDRE_1D, resolution=16, tolerance=1e-13)
    if tau == 0:
        return np.zeros((2 * radius + 1, 2 * radius + 1))

    def evaluate(n):
        nodes, weights = geometric_nodes(tau, order=n)
        w = bessel_i_table(radius, 2.0 * nodes)
        line = np.concatenate([w[:0:-1], w])
        return (line * weights) @ line.T

    return refine(evaluate, spec, "time integral patch").value


def v_exact(point, t, route=TIME_INTEGRAL, spec=None):
    """v_eps(x, t) = int_0^t u_eps(x, t') dt'."""
    if route not in V_ROUTES:
        raise PreconditionError(f"unknown route {route!r}; choose from {V_ROUTES}")
    if not t >= 0:
        raise DomainError(f"time must be non-negative, got {t}")
    if t == 0:
        return 0.0
    tau = t / point.eps ** 2
    if route == TIME_INTEGRAL:
        return v_time_integral_scaled(point.s1, point.s2, tau, spec)
    return v_spectral_scaled(point.s1, point.s2, tau, spec)


def discrete_laplacian(field, point):
    """Five-point Laplacian of field(LatticePoint) at point, scaled by eps^-2."""
    centre = field(point)
    neighbours = sum(field(point.shifted(d1, d2)) for d1, d2 in ((1, 0), (-1, 0), (0, 1), (0, -1)))
    return (neighbours - 4.0 * centre) / point.eps ** 2


def heat_residuals(point, t):
    """(du/dt - Lap u, dv/dt - Lap v - delta) at (x, t) for t > 0; both vanish exactly."""
    u_dot = u_exact(KernelQuery(point, t, 1))
    lap_u = discrete_laplacian(lambda p: u_exact(KernelQuery(p, t)), point)
    v_dot = u_exact(KernelQuery(point, t))
    lap_v = discrete_laplacian(lambda p: v_exact(p, t), point)
    return u_dot - lap_u, v_dot - lap_v - lattice_delta(point)


def _patch_laplacian(field):
    return field[2:, 1:-1] + field[:-2, 1:-1] + field[1:-1, 2:] + field[1:-1, :-2] - 4.0 * field[1:-1, 1:-1]


def heat_residual_patch(t, radius, eps=1.0):
    """heat_residuals at every |s|_inf <= radius, indexed like product_patch.

    du/dt comes from the SPECTRAL route, u from the PRODUCT route and v from
    the time-integral rule, so the u residual also compares the two routes.
    """
    if not t > 0:
        raise DomainError(f"heat residuals need t > 0, got {t}")
    tau = t / eps ** 2
    u = product_patch(tau, radius + 1)
    v = time_integral_patch(tau, radius + 1)
    u_dot = spectral_patch(tau, radius, J=1)
    delta = np.zeros_like(u_dot)
    delta[radius, radius] = 1.0
    u_residual = (u_dot - _patch_laplacian(u)) / eps ** 4
    v_residual = (u[1:-1, 1:-1] - _patch_laplacian(v) - delta) / eps ** 2
    return u_residual, v_residual


def evaluate_batch(queries, route=PRODUCT, workers=None):
    """u_exact over a sequence of queries; results keep the input order."""
    queries = list(queries)
    if not workers or workers < 2:
        return [u_exact(q, route) for q in queries]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda q: u_exact(q, route), queries))


def route_rows(queries, workers=None):
    """Both u routes for each query as rows keyed by KERNEL_COLUMNS, in input order."""
    queries = list(queries)
    spectral = evaluate_batch(queries, SPECTRAL, workers)
    product = evaluate_batch(queries, PRODUCT, workers)
    return [
        {"s1": q.point.s1, "s2": q.point.s2, "eps": q.point.eps, "t": q.t, "J": q.J,
         "value_spectral": a, "value_product": b, "abs_diff": abs(a - b)}
        for q, a, b in zip(queries, spectral, product)
    ]
