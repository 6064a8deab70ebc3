#!/usr/bin/env python3
"""
Large-time expansions of the lattice heat kernel and its time integral.

    d^J u_eps/dt^J (x, t) ~ sum_{n<N} eps^(2n) / t^(n+1+J) * H_Jn(x/sqrt t)
    v_eps(x, t)           ~ F_0(x/sqrt t) + Omega(x/eps) + sum_{1<=n<N} eps^(2n)/t^n F_n(x/sqrt t)
    v_eps(0, t)           ~ ln(t/eps^2)/(4 pi) + S0 - sum_{1<=n<N} eps^(2n)/t^n H_0n(0)/n

H_0n are fixed combinations of derivatives of the Gaussian H; H_1n is the
exact time derivative of t^-(n+1) H_0n(x/sqrt t), rescaled to y.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from constants import s0_quadrature
from errors import DomainError, EnvelopeError
from kernel import LatticePoint, product_patch, u_exact, v_exact
from omega import omega_value
from quad import GAUSS_LEGENDRE_1D, QuadratureSpec, gauss_legendre, refine
from settings import get_settings
from specfun import GaussianDerivative, exp_integral_e1

logger = logging.getLogger(__name__)

SUPPORTED_J = (0, 1)
SUPPORTED_N = (1, 2, 3)


@dataclass(frozen=True)
class ExpansionCoefficients:
    """Weights of the derivative combinations in H_01 and H_02."""
    quartic: float = 2.0 / math.factorial(4)
    sextic: float = 2.0 / math.factorial(6)
    quartic_squared: float = 4.0 / (math.factorial(2) * math.factorial(4) ** 2)


DEFAULT_COEFFICIENTS = ExpansionCoefficients()


def _add(op, key, weight):
    op[key] = op.get(key, 0.0) + weight


def correction_operator(n, coefficients=DEFAULT_COEFFICIENTS):
    """{(k1, k2): weight} with H_0n = sum weight * d^k1_1 d^k2_2 H."""
    if n == 0:
        return {(0, 0): 1.0}
    if n == 1:
        return {(4, 0): coefficients.quartic, (0, 4): coefficients.quartic}
    if n == 2:
        op = {}
        _add(op, (6, 0), coefficients.sextic)
        _add(op, (0, 6), coefficients.sextic)
        # (d1^4 + d2^4)^2
        _add(op, (8, 0), coefficients.quartic_squared)
        _add(op, (4, 4), 2.0 * coefficients.quartic_squared)
        _add(op, (0, 8), coefficients.quartic_squared)
        return op
    raise EnvelopeError(f"expansion term n={n} is not tabulated (n <= 2)", limit=2)


def apply_operator(op, y1, y2):
    return sum(weight * GaussianDerivative(k1, k2)(y1, y2) for (k1, k2), weight in sorted(op.items()))


def h_term(J, n, y, coefficients=DEFAULT_COEFFICIENTS):
    """H_Jn(y) for J in {0, 1}, n in {0, 1, 2}."""
    if J not in SUPPORTED_J:
        raise EnvelopeError(f"time-derivative order J={J} is not supported", limit=max(SUPPORTED_J))
    y1, y2 = y
    op = correction_operator(n, coefficients)
    base = apply_operator(op, y1, y2)
    if J == 0:
        return base
    # d/dt [t^-(n+1) G(x/sqrt t)] = t^-(n+2) [-(n+1) G - y.grad G / 2]
    d1 = {(k1 + 1, k2): w for (k1, k2), w in op.items()}
    d2 = {(k1, k2 + 1): w for (k1, k2), w in op.items()}
    return -(n + 1) * base - 0.5 * (np.asarray(y1) * apply_operator(d1, y1, y2)
                                    + np.asarray(y2) * apply_operator(d2, y1, y2))


@dataclass(frozen=True)
class ExpansionTermU:
    J: int
    n: int
    coefficients: ExpansionCoefficients = DEFAULT_COEFFICIENTS

    def __call__(self, y):
        return h_term(self.J, self.n, y, self.coefficients)


@dataclass(frozen=True)
class ExpansionTermV:
    n: int
    coefficients: ExpansionCoefficients = DEFAULT_COEFFICIENTS

    def __call__(self, y):
        return f_term(self.n, y, self.coefficients)


def f_term(n, y, coefficients=DEFAULT_COEFFICIENTS):
    """F_0 = E1(|y|^2/4)/(4 pi); F_n = -(2/|y|^2n) int_0^|y| rho^(2n-1) H_0n(rho e) drho."""
    y1, y2 = float(y[0]), float(y[1])
    r = math.hypot(y1, y2)
    if r == 0:
        raise DomainError("F_n is evaluated away from y = 0")
    if n == 0:
        return exp_integral_e1(0.25 * r * r) / (4.0 * math.pi)
    c, s = y1 / r, y2 / r
    op = correction_operator(n, coefficients)

    def integrand(rho):
        return rho ** (2 * n - 1) * apply_operator(op, rho * c, rho * s)

    spec = QuadratureSpec(rule=GAUSS_LEGENDRE_1D, resolution=32, tolerance=1e-13)
    integral = refine(lambda k: gauss_legendre(integrand, 0.0, r, k), spec, f"F_{n}").value
    return -2.0 * integral / r ** (2 * n)


@dataclass(frozen=True)
class ExpansionReport:
    kind: str
    s: Tuple[int, int]
    eps: float
    t: float
    J: int
    N: int
    t0: float
    terms: Tuple[float, ...]
    extras: Dict[str, float] = field(default_factory=dict)
    exact: float = 0.0

    @property
    def value(self):
        return float(sum(self.terms) + sum(self.extras.values()))

    @property
    def residual(self):
        return self.exact - self.value

    @property
    def order(self):
        """Power of 1/t the residual is expected to decay with."""
        if self.kind == "u":
            return self.N + 1 + self.J
        return self.N

    @property
    def bound_check(self):
        """residual * t^order / eps^(2N); bounded as t grows when the expansion holds."""
        return self.residual * self.t ** self.order / self.eps ** (2 * self.N)

    def to_row(self):
        return {
            "kind": self.kind, "s1": self.s[0], "s2": self.s[1], "eps": self.eps, "t": self.t,
            "J": self.J, "N": self.N, "value": self.value, "exact": self.exact,
            "residual": self.residual, "bound_check": self.bound_check,
        }


def _check_regime(t, eps, N, t0):
    if N not in SUPPORTED_N:
        raise EnvelopeError(f"expansion length N={N} is not supported", limit=max(SUPPORTED_N))
    t0 = get_settings().t0 if t0 is None else t0
    if not t >= t0 * eps * eps:
        raise DomainError(f"t={t} lies below the expansion regime t >= t0 eps^2 = {t0 * eps * eps}")
    return t0


def u_expansion(query, N, t0=None, coefficients=DEFAULT_COEFFICIENTS):
    """Truncated expansion of d^J u_eps/dt^J and the residual against the PRODUCT route."""
    point, t, J = query.point, query.t, query.J
    if J not in SUPPORTED_J:
        raise EnvelopeError(f"time-derivative order J={J} is not supported", limit=max(SUPPORTED_J))
    t0 = _check_regime(t, point.eps, N, t0)
    root = math.sqrt(t)
    y = (point.x[0] / root, point.x[1] / root)
    terms = tuple(point.eps ** (2 * n) / t ** (n + 1 + J) * float(h_term(J, n, y, coefficients))
                  for n in range(N))
    return ExpansionReport("u", (point.s1, point.s2), point.eps, t, J, N, t0, terms,
                           exact=u_exact(query))


def u_uniformity(t, N, eps=1.0, t0=None, coefficients=DEFAULT_COEFFICIENTS):
    """sup of |bound_check| for J = 0 over the lattice ball |x| <= 4 sqrt(t)."""
    _check_regime(t, eps, N, t0)
    tau = t / eps ** 2
    radius = int(math.floor(4.0 * math.sqrt(tau)))
    exact = product_patch(tau, radius) / eps ** 2
    s = np.arange(-radius, radius + 1)
    s1, s2 = np.meshgrid(s, s, indexing="ij")
    inside = s1 * s1 + s2 * s2 <= 16.0 * tau
    root = math.sqrt(t)
    y = (eps * s1[inside] / root, eps * s2[inside] / root)
    value = sum(eps ** (2 * n) / t ** (n + 1) * h_term(0, n, y, coefficients) for n in range(N))
    residual = exact[inside] - value
    return float(np.max(np.abs(residual))) * t ** (N + 1) / eps ** (2 * N)


def v_expansion_offorigin(point, t, N, t0=None, include_omega=True, coefficients=DEFAULT_COEFFICIENTS):
    """F_0 + Omega + sum eps^2n/t^n F_n at x != 0, with the residual against the exact v."""
    if point.is_origin:
        raise DomainError("use v_expansion_origin at x = 0")
    t0 = _check_regime(t, point.eps, N, t0)
    root = math.sqrt(t)
    y = (point.x[0] / root, point.x[1] / root)
    terms = tuple(point.eps ** (2 * n) / t ** n * f_term(n, y, coefficients) for n in range(N))
    extras = {"omega": omega_value(point.s1, point.s2)} if include_omega else {}
    return ExpansionReport("v", (point.s1, point.s2), point.eps, t, 0, N, t0, terms, extras,
                           exact=v_exact(point, t))


def v_expansion_origin(t, eps, N, t0=None, coefficients=DEFAULT_COEFFICIENTS):
    """ln(t/eps^2)/(4 pi) + S0 - sum eps^2n/t^n H_0n(0)/n at x = 0."""
    t0 = _check_regime(t, eps, N, t0)
    terms = tuple(-(eps ** (2 * n)) / t ** n * float(h_term(0, n, (0.0, 0.0), coefficients)) / n
                  for n in range(1, N))
    extras = {"log": math.log(t / eps ** 2) / (4.0 * math.pi), "s0": s0_quadrature().total}
    return ExpansionReport("v0", (0, 0), eps, t, 0, N, t0, terms, extras,
                           exact=v_exact(LatticePoint(0, 0, eps), t))
