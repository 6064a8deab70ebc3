#!/usr/bin/env python3
"""
Quadrature rules for the lattice integrals.

Three rules are provided:
    * periodic trapezoid on the torus [-pi, pi)^2 (spectrally accurate for
      smooth periodic integrands),
    * a polar product rule: Gauss-Legendre in rho, trapezoid (full circle)
      or Gauss-Legendre per sector (domains with corners) in phi,
    * oscillatory tails over [z0, inf) closed by repeated integration by
      parts of a cosine envelope.

Refinement doubles the resolution until two successive estimates agree to
tolerance * max(1, |value|).
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np

from errors import ConvergenceError, DomainError, PreconditionError

logger = logging.getLogger(__name__)

PERIODIC_2D = "periodic-trapezoid-2d"
GAUSS_LEGENDRE_1D = "gauss-legendre-1d"
POLAR_PRODUCT = "polar-product"
RULES = (PERIODIC_2D, GAUSS_LEGENDRE_1D, POLAR_PRODUCT)

FIXED = "fixed"
DOUBLING = "doubling-until-tolerance"
REFINEMENTS = (FIXED, DOUBLING)

MAX_RESOLUTION = 2 ** 14
# Points evaluated per block; keeps memory flat at high resolution.
BLOCK_POINTS = 2 ** 21


@dataclass(frozen=True)
class QuadratureSpec:
    rule: str = PERIODIC_2D
    resolution: int = 32
    refinement: str = DOUBLING
    tolerance: float = 1e-12
    max_resolution: int = MAX_RESOLUTION

    def __post_init__(self):
        if self.rule not in RULES:
            raise PreconditionError(f"unknown quadrature rule {self.rule!r}")
        if self.refinement not in REFINEMENTS:
            raise PreconditionError(f"unknown refinement {self.refinement!r}")
        if int(self.resolution) != self.resolution or self.resolution < 2:
            raise PreconditionError(f"resolution must be an integer >= 2, got {self.resolution}")
        if self.refinement == DOUBLING:
            # doubled grids nest only from a power of two
            if self.resolution < 8 or self.resolution & (self.resolution - 1):
                raise PreconditionError(f"doubling needs a power of two >= 8, got {self.resolution}")
            if not self.tolerance > 0:
                raise PreconditionError("doubling refinement needs a positive tolerance")
            if self.max_resolution < self.resolution:
                raise PreconditionError("max_resolution is below the starting resolution")

    def at_least(self, resolution):
        """Copy whose starting resolution is raised to the next power of two >= resolution."""
        n = self.resolution
        while n < resolution:
            n *= 2
        return replace(self, resolution=n, max_resolution=max(self.max_resolution, n))


@dataclass(frozen=True)
class QuadratureResult:
    value: object
    error: float
    resolution: int
    history: Tuple[float, ...] = ()


def refine(evaluate, spec, label="integral"):
    """Run evaluate(n) under the refinement policy of a QuadratureSpec.

    evaluate may return a float or an array; for arrays the largest
    component change is the error estimate.
    """
    n = spec.resolution
    value = evaluate(n)
    if spec.refinement == FIXED:
        return QuadratureResult(value, float("nan"), n)

    history = []
    previous = float("nan")
    while True:
        if n * 2 > spec.max_resolution:
            raise ConvergenceError(
                f"{label}: no agreement to {spec.tolerance:g} by resolution {n}",
                estimates=(previous, value),
            )
        n *= 2
        new = evaluate(n)
        previous = value
        change = float(np.max(np.abs(np.asarray(new) - np.asarray(value))))
        scale = max(1.0, float(np.max(np.abs(new))))
        history.append(change)
        logger.debug("%s: resolution %d, change %.3e", label, n, change)
        value = new
        if change <= spec.tolerance * scale:
            return QuadratureResult(value, change, n, tuple(history))


@lru_cache(maxsize=64)
def gauss_legendre_nodes(n):
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(f, a, b, order=32):
    """Fixed-order Gauss-Legendre rule for a vectorised f on [a, b]."""
    x, w = gauss_legendre_nodes(order)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    return half * float(np.dot(w, np.broadcast_to(f(nodes), nodes.shape)))


def integrate_panels(f, a, b, panel_width=math.pi, order=16):
    """Composite Gauss-Legendre over equal panels no wider than panel_width."""
    if b <= a:
        return 0.0
    panels = max(1, int(math.ceil((b - a) / panel_width)))
    x, w = gauss_legendre_nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    nodes = edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)
    values = np.broadcast_to(f(nodes.ravel()), (nodes.size,)).reshape(nodes.shape)
    return float(np.sum((values @ w) * half))


def integrate_geometric(f, b, order=32, first=1.0):
    """Integral over [0, b] on panels [0, first], [first, 2 first], [2 first, 4 first], ...

    Suited to integrands that are smooth on a logarithmic scale, such as
    kernels decaying like 1/t.
    """
    if b < 0:
        raise DomainError(f"upper limit must be non-negative, got {b}")
    if b == 0:
        return 0.0
    nodes, weights = geometric_nodes(b, order, first)
    return float(np.dot(np.asarray(f(nodes)).reshape(nodes.shape), weights))


def geometric_nodes(b, order=32, first=1.0):
    """Flattened nodes and weights of the integrate_geometric rule on [0, b], b > 0."""
    edges = [0.0]
    edge = first
    while edge < b:
        edges.append(edge)
        edge *= 2.0
    edges.append(b)
    edges = np.asarray(edges)
    x, w = gauss_legendre_nodes(order)
    half = 0.5 * np.diff(edges)
    nodes = edges[:-1, None] + half[:, None] * (x[None, :] + 1.0)
    return nodes.ravel(), (half[:, None] * w[None, :]).ravel()


def integrate_interval(f, a, b, spec=None):
    """Gauss-Legendre on [a, b] with the order doubled until stable."""
    spec = spec or QuadratureSpec(rule=GAUSS_LEGENDRE_1D, resolution=32)
    return refine(lambda n: gauss_legendre(f, a, b, n), spec, "interval").value


# --- periodic trapezoid -------------------------------------------------------

def _periodic_sum(f, n):
    theta = -math.pi + 2.0 * math.pi * np.arange(n) / n
    rows = max(1, BLOCK_POINTS // n)
    total = 0.0
    for start in range(0, n, rows):
        block = theta[start:start + rows]
        values = f(block[:, None], theta[None, :])
        total += float(np.sum(np.broadcast_to(values, (block.size, n))))
    return total * (2.0 * math.pi / n) ** 2


def periodic_2d_result(f, spec=None):
    spec = spec or QuadratureSpec()
    return refine(lambda n: _periodic_sum(f, n), spec, "periodic trapezoid")


def integrate_periodic_2d(f, spec=None):
    """Integral of a 2*pi-periodic f(theta1, theta2) over [-pi, pi)^2.

    f is called with broadcastable arrays of shapes (k, 1) and (1, n).
    """
    return periodic_2d_result(f, spec).value


# --- polar product rule -------------------------------------------------------

def square_boundary(phi, half_width=math.pi):
    """Distance from the origin to the square [-h, h]^2 along direction phi."""
    phi = np.asarray(phi, dtype=float)
    return half_width / np.maximum(np.abs(np.cos(phi)), np.abs(np.sin(phi)))


@dataclass(frozen=True)
class PolarDomain:
    """Star-shaped region {(rho, phi): rho_min(phi) <= rho <= rho_max(phi)}.

    With breakpoints the angular range is split into sectors integrated by
    Gauss-Legendre; without them a full circle uses the periodic trapezoid.
    """
    rho_max: Callable
    rho_min: Optional[Callable] = None
    phi_start: float = -math.pi
    phi_end: float = math.pi
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        if not self.phi_end > self.phi_start:
            raise PreconditionError("empty angular range")

    @property
    def full_circle(self):
        return abs((self.phi_end - self.phi_start) - 2.0 * math.pi) < 1e-14

    def sectors(self):
        edges = [self.phi_start]
        edges += [b for b in sorted(self.breakpoints) if self.phi_start < b < self.phi_end]
        edges.append(self.phi_end)
        return list(zip(edges[:-1], edges[1:]))

    @classmethod
    def disc(cls, radius):
        if not radius > 0:
            raise DomainError(f"disc radius must be positive, got {radius}")
        return cls(rho_max=lambda phi: np.full(np.shape(phi), float(radius)))

    @classmethod
    def square(cls, half_width=math.pi):
        # r(phi) has corners at odd multiples of pi/4
        return cls(
            rho_max=lambda phi: square_boundary(phi, half_width),
            breakpoints=tuple(-math.pi + k * math.pi / 4.0 for k in range(1, 8)),
        )

    @classmethod
    def square_minus_disc(cls, half_width=math.pi):
        """The square minus its inscribed disc."""
        return cls(
            rho_max=lambda phi: square_boundary(phi, half_width),
            rho_min=lambda phi: np.full(np.shape(phi), float(half_width)),
            breakpoints=tuple(-math.pi + k * math.pi / 4.0 for k in range(1, 8)),
        )


def _radial_sums(f, domain, phi, n):
    x, w = gauss_legendre_nodes(n)
    hi = np.asarray(domain.rho_max(phi), dtype=float)
    lo = np.zeros_like(hi) if domain.rho_min is None else np.asarray(domain.rho_min(phi), dtype=float)
    half = 0.5 * (hi - lo)
    out = np.empty(phi.size)
    rows = max(1, BLOCK_POINTS // n)
    for start in range(0, phi.size, rows):
        sl = slice(start, start + rows)
        rho = lo[sl, None] + half[sl, None] * (x[None, :] + 1.0)
        values = np.broadcast_to(f(rho, phi[sl, None]), rho.shape) * rho
        out[sl] = (values @ w) * half[sl]
    return out


def _polar_sum(f, domain, n):
    if domain.full_circle and not domain.breakpoints:
        phi = domain.phi_start + 2.0 * math.pi * np.arange(n) / n
        return float(np.sum(_radial_sums(f, domain, phi, n))) * 2.0 * math.pi / n
    x, w = gauss_legendre_nodes(n)
    total = 0.0
    for a, b in domain.sectors():
        half = 0.5 * (b - a)
        phi = a + half * (x + 1.0)
        total += half * float(np.dot(w, _radial_sums(f, domain, phi, n)))
    return total


def polar_result(f, domain, spec=None):
    spec = spec or QuadratureSpec(rule=POLAR_PRODUCT)
    return refine(lambda n: _polar_sum(f, domain, n), spec, "polar product")


def integrate_polar(f, domain, spec=None):
    """Integral of f over a PolarDomain; the Jacobian rho is applied here.

    f is called as f(rho, phi) with rho of shape (k, n) and phi of shape (k, 1).
    """
    return polar_result(f, domain, spec).value


# --- oscillatory tails --------------------------------------------------------

@dataclass(frozen=True)
class OscillatoryEnvelope:
    """Large-argument form sum_j c_j * z**(-p_j) * cos(z - phase_j).

    order is the Bessel order the envelope describes; the form is only
    used for z >= max(1, order**2).
    """
    terms: Tuple[Tuple[float, float, float], ...]
    order: int = 0

    @property
    def threshold(self):
        return max(1.0, float(self.order) ** 2)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        total = np.zeros_like(z)
        for c, p, phase in self.terms:
            total = total + c * z ** (-p) * np.cos(z - phase)
        return total

    def divided_by_power(self, q):
        """Envelope of f(z) / z**q."""
        return replace(self, terms=tuple((c, p + q, phase) for c, p, phase in self.terms))


def _cosine_tail(power, phase, z0, depth):
    # int_z0^inf z^-p cos(z - a) dz = -z0^-p sin(z0 - a) + p int z^-(p+1) cos(z - a - pi/2) dz
    total = 0.0
    factor = 1.0
    for _ in range(depth):
        total -= factor * z0 ** (-power) * math.sin(z0 - phase)
        factor *= power
        power += 1.0
        phase += 0.5 * math.pi
    return total


def oscillatory_tail(envelope, z0, depth=8):
    """Integral of the envelope over [z0, inf) by repeated integration by parts."""
    if z0 < envelope.threshold:
        raise DomainError(
            f"tail start z0={z0} is below max(1, n^2)={envelope.threshold:g} for order {envelope.order}"
        )
    return sum(c * _cosine_tail(p, phase, float(z0), depth) for c, p, phase in envelope.terms)


def semi_infinite_integral(f, envelope, z0, switch=None, order=16):
    """Integral of f over [z0, inf): panels up to a switch point, then the envelope tail."""
    if switch is None:
        switch = max(400.0, 4.0 * envelope.threshold)
    start = max(float(z0), float(switch))
    head = integrate_panels(f, float(z0), start, math.pi, order) if start > z0 else 0.0
    return head + oscillatory_tail(envelope, start)
