#!/usr/bin/env python3
"""
The spatial constant Omega(x) in the large-time expansion of v_eps away from the origin.

Omega is computed from the split

    Omega = (I1 + I3 + I4) / (2 pi)^2
    I1 = int_{R_pi} cos(x.theta) (1/A - 1/|theta|^2) dtheta
    I3 = int_{R_pi minus B_pi} cos(x.theta) / |theta|^2 dtheta
    I4 = -2 pi int_{pi r}^inf J_0(z) / z dz

and, independently, from the direct form with the singular part
cos(x.theta)/A - 1/|theta|^2 integrated over R_pi. Arguments are lattice
indices: Omega is evaluated at s = x / eps.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from constants import boundary_integral
from errors import DomainError
from kernel import LatticePoint, symbol_A, symbol_deficit, symbol_difference
from quad import POLAR_PRODUCT, PolarDomain, QuadratureSpec, integrate_polar, semi_infinite_integral
from settings import get_settings
from specfun import bessel_j, euler_gamma, hankel_envelope

logger = logging.getLogger(__name__)

SERIES_RADIUS = 1e-3
FAR_FIELD_MIN_RADIUS = 5.0
SPECTRUM_MAX_ORDER = 64


def _spec(r):
    # the integrands oscillate about r times per unit of rho
    start = 64 if r < 20 else 128
    return QuadratureSpec(rule=POLAR_PRODUCT, resolution=start, tolerance=get_settings().tolerance)


# --- D and E ------------------------------------------------------------------

def _sine_deficit(theta):
    """theta - sin(theta)."""
    t2 = theta * theta
    series = theta * t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 * (1.0 / 5040.0 - t2 / 362880.0)))
    return np.where(np.abs(theta) < 0.1, series, theta - np.sin(theta))


def d_function(theta1, theta2):
    """D(theta) = -2 sin(theta1)/A^2 + 2 theta1/|theta|^4, the theta1-derivative of 1/A - 1/|theta|^2."""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    a = symbol_A((theta1, theta2))
    rho2 = theta1 * theta1 + theta2 * theta2
    # theta1 A^2 - rho^4 sin(theta1), rearranged so nothing cancels at small rho
    numerator = (-theta1 * symbol_deficit(theta1, theta2) * (a + rho2)
                 + rho2 * rho2 * _sine_deficit(theta1))
    value = 2.0 * numerator / (a * a * rho2 * rho2)
    return float(value) if np.ndim(value) == 0 else value


def _e_limit(phi):
    c, s = np.cos(phi), np.sin(phi)
    return (c ** 3 - c ** 5 - c * s ** 4) / 3.0


def _e_curvature(phi):
    c, s = np.cos(phi), np.sin(phi)
    quartic = c ** 4 + s ** 4
    return (-c ** 5 / 60.0 + c * (c ** 6 + s ** 6) / 90.0
            + quartic * c ** 3 / 18.0 - c * quartic * quartic / 24.0)


def e_series(rho, phi):
    """Small-rho form of E: the rho -> 0 limit plus its rho^2 correction."""
    return _e_limit(phi) + rho * rho * _e_curvature(phi)


def e_direct(rho, phi):
    return rho * d_function(rho * np.cos(phi), rho * np.sin(phi))


def e_function(rho, phi):
    """E(rho, phi) = rho * D(rho cos phi, rho sin phi).

    Below rho = 1e-3 the limit (cos 3phi - cos 5phi)/24 plus its rho^2
    correction is used; E is even in rho.
    """
    rho = np.asarray(rho, dtype=float)
    phi = np.asarray(phi, dtype=float)
    if np.any(rho < 0):
        raise DomainError("rho must be non-negative")
    rho, phi = np.broadcast_arrays(rho, phi)
    series = e_series(rho, phi)
    direct = e_direct(np.where(rho > SERIES_RADIUS, rho, 1.0), phi)
    value = np.where(rho > SERIES_RADIUS, direct, series)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class AngularSpectrum:
    """E(rho, phi) = a[0] + sum_n a[n] cos(n phi) + b[n] sin(n phi)."""
    rho: float
    a: np.ndarray
    b: np.ndarray

    @property
    def n_max(self):
        return self.a.size - 1

    def decay_constant(self, power=6, start=1):
        """max over n >= start of n^power * max(|a_n|, |b_n|)."""
        n = np.arange(start, self.n_max + 1)
        size = np.maximum(np.abs(self.a[start:]), np.abs(self.b[start:]))
        return float(np.max(n ** float(power) * size))


def angular_spectrum(rho, n_max):
    """Fourier coefficients of E(rho, .) up to order n_max."""
    if not rho >= 0:
        raise DomainError("rho must be non-negative")
    if int(n_max) != n_max or not 1 <= n_max <= SPECTRUM_MAX_ORDER:
        raise DomainError(f"n_max must be an integer in [1, {SPECTRUM_MAX_ORDER}], got {n_max}")
    samples = max(4 * int(n_max), 64)
    phi = 2.0 * math.pi * np.arange(samples) / samples
    coefficients = np.fft.rfft(e_function(np.full(samples, float(rho)), phi)) / samples
    a = 2.0 * coefficients[: n_max + 1].real
    b = -2.0 * coefficients[: n_max + 1].imag
    a[0] *= 0.5
    b[0] = 0.0
    return AngularSpectrum(float(rho), a, b)


# --- the split I1 + I3 + I4 ---------------------------------------------------

def i1_integral(r, psi):
    def integrand(rho, phi):
        return np.cos(r * rho * np.cos(phi - psi)) * symbol_difference(rho * np.cos(phi), rho * np.sin(phi))

    return integrate_polar(integrand, PolarDomain.square(), _spec(r))


def i3_integral(r, psi):
    def integrand(rho, phi):
        return np.cos(r * rho * np.cos(phi - psi)) / (rho * rho)

    return integrate_polar(integrand, PolarDomain.square_minus_disc(), _spec(r))


def i4_integral(r):
    if not r > 0:
        raise DomainError("r must be positive")
    tail = semi_infinite_integral(lambda z: bessel_j(0, z) / z,
                                  hankel_envelope(0, 6).divided_by_power(1.0),
                                  math.pi * r, order=24)
    return -2.0 * math.pi * tail


class OmegaDecomposition(NamedTuple):
    r: float
    psi: float
    i1: float
    i3: float
    i4: float
    omega: float


def _lattice_polar(point):
    if point.is_origin:
        raise DomainError("Omega is defined away from the origin only")
    return math.hypot(point.s1, point.s2), point.psi


def omega_exact(point):
    """Omega at lattice site s with its three parts."""
    r, psi = _lattice_polar(point)
    i1 = i1_integral(r, psi)
    i3 = i3_integral(r, psi)
    i4 = i4_integral(r)
    omega = (i1 + i3 + i4) / (2.0 * math.pi) ** 2
    logger.debug("Omega(%d, %d) = %.17g", point.s1, point.s2, omega)
    return OmegaDecomposition(r, psi, i1, i3, i4, omega)


def omega_direct(point):
    """Omega from the singular-part representation (independent of I3 and I4)."""
    r, psi = _lattice_polar(point)

    def integrand(rho, phi):
        t1, t2 = rho * np.cos(phi), rho * np.sin(phi)
        half = np.sin(0.5 * r * rho * np.cos(phi - psi))
        return -2.0 * half * half / symbol_A((t1, t2)) + symbol_difference(t1, t2)

    singular = integrate_polar(integrand, PolarDomain.square(), _spec(r))
    bracket = 2.0 * math.pi * euler_gamma() + singular + boundary_integral()
    return bracket / (2.0 * math.pi) ** 2 + (math.log(r) - math.log(2.0)) / (2.0 * math.pi)


@lru_cache(maxsize=256)
def _omega_canonical(a, b):
    return omega_exact(LatticePoint(a, b)).omega


def omega_value(s1, s2):
    """Omega at lattice site (s1, s2), memoised up to the symmetries of the square."""
    a, b = sorted((abs(int(s1)), abs(int(s2))), reverse=True)
    return _omega_canonical(a, b)


# --- far field ----------------------------------------------------------------

class OmegaAsymptotic(NamedTuple):
    leading: float
    residual_order_check: float


def omega_leading(r, psi):
    return math.cos(4.0 * psi) / (24.0 * math.pi * r * r)


def omega_asymptotic(point):
    """Leading far-field term cos(4 psi)/(24 pi r^2) and r^(5/2) |Omega - leading|."""
    r, psi = _lattice_polar(point)
    if r < FAR_FIELD_MIN_RADIUS:
        raise DomainError(f"far-field form needs r >= {FAR_FIELD_MIN_RADIUS:g}, got r={r:g}")
    leading = omega_leading(r, psi)
    omega = omega_value(point.s1, point.s2)
    return OmegaAsymptotic(leading, r ** 2.5 * abs(omega - leading))


class I3Structure(NamedTuple):
    oscillatory: float
    hat: float


def in_axis_sector(psi):
    """True when |cos psi| >= |sin psi| (the diagonals belong to this sector)."""
    return abs(math.cos(psi)) >= abs(math.sin(psi)) - 1e-15


def _axis_angle(psi):
    if in_axis_sector(psi):
        return psi
    turned = psi - 0.5 * math.pi
    return turned + 2.0 * math.pi if turned < -math.pi else turned


def i3_hat(r, psi):
    """-(1/(r cos psi)) int_{R_pi minus B_pi} sin(x.theta) d/dtheta1 (1/|theta|^2) dtheta."""
    psi = _axis_angle(psi)

    def integrand(rho, phi):
        return np.sin(r * rho * np.cos(phi - psi)) * np.cos(phi) / rho ** 3

    return 2.0 / (r * math.cos(psi)) * integrate_polar(integrand, PolarDomain.square_minus_disc(), _spec(r))


def i3_oscillatory(r):
    return -(2.0 * math.sqrt(2.0) / math.pi) * math.sin(math.pi * r - 0.25 * math.pi) * r ** -1.5


def i3_structure(r, psi):
    """The r^(-3/2) oscillating part of I3 and the remaining integral term."""
    if r < FAR_FIELD_MIN_RADIUS:
        raise DomainError(f"I3 structure needs r >= {FAR_FIELD_MIN_RADIUS:g}, got r={r:g}")
    return I3Structure(i3_oscillatory(r), i3_hat(r, psi))


def sigma1(r, psi):
    """int over the disc of radius pi of sin(x.theta) D(theta) dtheta."""

    def integrand(rho, phi):
        return np.sin(r * rho * np.cos(phi - psi)) * d_function(rho * np.cos(phi), rho * np.sin(phi))

    return integrate_polar(integrand, PolarDomain.disc(math.pi), _spec(r))


def sigma1_leading(r, psi):
    return -(math.pi / (12.0 * r)) * (math.cos(3.0 * psi) + math.cos(5.0 * psi))


def circle_sites(radius):
    """Lattice sites in the first octant whose distance from the origin rounds to radius."""
    sites = []
    for s1 in range(int(radius) + 2):
        for s2 in range(s1 + 1):
            if round(math.hypot(s1, s2)) == radius:
                sites.append(LatticePoint(s1, s2))
    return sites


def angular_purity(radius):
    """Size of the strongest harmonic other than cos(4 psi) in r^2 Omega, relative to cos(4 psi).

    r^2 Omega on the sites of circle_sites(radius) is fitted by least squares
    to c0 + c4 cos(4 psi) + c8 cos(8 psi); the result is max(|c0|, |c8|) / |c4|.
    """
    sites = circle_sites(radius)
    if len(sites) < 3:
        raise DomainError(f"too few lattice sites near the circle r={radius}")
    psi = np.array([p.psi for p in sites])
    r = np.array([math.hypot(p.s1, p.s2) for p in sites])
    values = np.array([omega_value(p.s1, p.s2) for p in sites]) * r * r
    design = np.column_stack([np.ones_like(psi), np.cos(4.0 * psi), np.cos(8.0 * psi)])
    (c0, c4, c8), *_ = np.linalg.lstsq(design, values, rcond=None)
    return max(abs(c0), abs(c8)) / abs(c4)
