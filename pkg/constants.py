#!/usr/bin/env python3
"""
The constant S0 in the small-eps expansion of v_eps at the origin.

    S0 = (pi*gamma + int_{R_pi} (1/A - 1/|theta|^2) dtheta + int_0^{2pi} ln r_pi(phi) dphi) / (2 pi)^2

pi*gamma is computed twice: from Euler's constant itself and from the pair of
Gaussian integrals 2pi (int_0^1 (1 - e^-rho^2)/rho - int_1^inf e^-rho^2/rho).
"""

import logging
import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from errors import ConvergenceError, DomainError
from kernel import symbol_difference
from quad import POLAR_PRODUCT, PolarDomain, QuadratureSpec, gauss_legendre, integrate_panels, integrate_polar, square_boundary
from specfun import euler_gamma

logger = logging.getLogger(__name__)

ROUTE_AGREEMENT = 1e-8


def r_pi(phi):
    """Distance from the origin to the boundary of [-pi, pi]^2 in direction phi."""
    phi_arr = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi_arr)):
        raise DomainError("angle must be finite")
    value = square_boundary(phi_arr)
    return float(value) if value.ndim == 0 else value


def _polar_spec():
    return QuadratureSpec(rule=POLAR_PRODUCT, resolution=32, tolerance=1e-13)


@lru_cache(maxsize=1)
def boundary_integral():
    """int_0^{2pi} ln r_pi(phi) dphi; the eight octants contribute equally."""
    octant = gauss_legendre(lambda phi: np.log(r_pi(phi)), 0.0, 0.25 * math.pi, 64)
    return 8.0 * octant


def _symbol_integrand(rho, phi):
    return symbol_difference(rho * np.cos(phi), rho * np.sin(phi))


@lru_cache(maxsize=1)
def symbol_integral_square():
    """int over [-pi, pi]^2 of 1/A - 1/|theta|^2."""
    return integrate_polar(_symbol_integrand, PolarDomain.square(), _polar_spec())


@lru_cache(maxsize=1)
def symbol_integral_unit_disc():
    """int over the unit disc of 1/A - 1/|theta|^2."""
    return integrate_polar(_symbol_integrand, PolarDomain.disc(1.0), _polar_spec())


@lru_cache(maxsize=1)
def gaussian_pair():
    """2pi (int_0^1 (1 - e^-rho^2)/rho drho - int_1^inf e^-rho^2/rho drho); equals pi*gamma."""
    near = gauss_legendre(lambda rho: -np.expm1(-rho * rho) / rho, 0.0, 1.0, 48)
    far = integrate_panels(lambda rho: np.exp(-rho * rho) / rho, 1.0, 9.0, 0.5, 32)
    return 2.0 * math.pi * (near - far)


@dataclass(frozen=True)
class S0Breakdown:
    gamma_part: float
    symbol_part: float
    boundary_part: float
    total: float
    symbol_part_unit_disc: float
    gaussian_part: float
    total_gaussian_route: float

    @property
    def symbol_sign(self):
        return "positive" if self.symbol_part > 0 else "negative"

    def to_dict(self):
        data = asdict(self)
        data["symbol_sign"] = self.symbol_sign
        return data


@lru_cache(maxsize=1)
def s0_quadrature():
    """S0 with its parts; both routes for pi*gamma must agree to 1e-8."""
    gamma_part = math.pi * euler_gamma()
    symbol_part = symbol_integral_square()
    boundary_part = boundary_integral()
    scale = (2.0 * math.pi) ** 2
    total = (gamma_part + symbol_part + boundary_part) / scale

    gaussian_part = gaussian_pair()
    total_gaussian = (gaussian_part + symbol_part + boundary_part) / scale
    if abs(total - total_gaussian) > ROUTE_AGREEMENT:
        raise ConvergenceError(
            f"S0 routes disagree: {total!r} vs {total_gaussian!r}",
            estimates=(total, total_gaussian),
        )
    logger.debug("S0 = %.17g (gamma %.6g, symbol %.6g, boundary %.6g)",
                 total, gamma_part, symbol_part, boundary_part)

    return S0Breakdown(
        gamma_part=gamma_part,
        symbol_part=symbol_part,
        boundary_part=boundary_part,
        total=total,
        symbol_part_unit_disc=symbol_integral_unit_disc(),
        gaussian_part=gaussian_part,
        total_gaussian_route=total_gaussian,
    )
