#!/usr/bin/env python3
"""
Special functions used by the lattice heat-kernel computations.

Bessel J_n is evaluated by its ascending series for small arguments, by
Miller's backward recurrence (normalised with J_0 + 2*sum J_2k = 1) in the
middle range, and by the Hankel large-argument expansion once z is large
compared with n^2. The exponentially scaled I_n comes from the same kind
of backward recurrence, normalised with I_0 + 2*sum I_k = e^z, so it never
overflows.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from errors import ConvergenceError, DomainError, EnvelopeError
from quad import OscillatoryEnvelope, gauss_legendre, semi_infinite_integral

logger = logging.getLogger(__name__)

# Accuracy envelopes (library policy)
J_MAX_ORDER = 200
J_MAX_ARGUMENT = 1e6
I_MAX_ORDER = 400
I_MAX_ARGUMENT = 1e4
TABLE_MAX_ORDER = 2000
TABLE_MAX_ARGUMENT = 1e6
GAUSSIAN_MAX_ORDER = 12

SERIES_SWITCH = 8.0
ASYMPTOTIC_SWITCH = 1000.0
HANKEL_MAX_TERMS = 40
_RESCALE = 1e250
_FPMIN = 1e-300


def _as_flat(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.isnan(z)):
        raise DomainError("argument contains NaN")
    return z, z.reshape(-1)


def _restore(values, z):
    values = values.reshape(z.shape)
    return float(values) if z.ndim == 0 else values


def _check_order(n, limit, name):
    if int(n) != n or n < 0:
        raise DomainError(f"{name} order must be a non-negative integer, got {n}")
    if n > limit:
        raise EnvelopeError(f"{name} order n={n} exceeds the supported limit {limit}", limit=limit)
    return int(n)


def _check_argument(flat, limit, name):
    if np.any(flat < 0):
        raise DomainError(f"{name} argument must be non-negative")
    if flat.size and np.max(flat) > limit:
        raise EnvelopeError(
            f"{name} argument z={np.max(flat):g} exceeds the supported limit {limit:g}", limit=limit
        )


# --- Bessel J -----------------------------------------------------------------

def _j_series(n, z):
    half = 0.5 * z
    term = np.exp(n * np.log(half) - math.lgamma(n + 1))
    total = term.copy()
    q = -half * half
    for m in range(1, 200):
        term = term * q / (m * (m + n))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total


def _j_hankel(n, z):
    mu = 4.0 * n * n
    chi = z - (0.5 * n + 0.25) * math.pi
    p = np.ones_like(z)
    q = np.zeros_like(z)
    term = np.ones_like(z)
    previous = np.full_like(z, np.inf)
    for k in range(1, HANKEL_MAX_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z)
        size = np.abs(term)
        if np.all(size >= previous) and k > n:
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            q += sign * term
        else:
            p += sign * term
        if np.all(size < 1e-17):
            break
        previous = size
    return np.sqrt(2.0 / (math.pi * z)) * (p * np.cos(chi) - q * np.sin(chi))


def _miller_start(n_max, z_top):
    start = max(n_max, int(z_top + 12.0 * z_top ** (1.0 / 3.0))) + 40
    return start + start % 2


def _j_miller(n_max, z):
    """Rows J_0..J_{n_max} for each positive z."""
    start = _miller_start(n_max, float(np.max(z)))
    table = np.zeros((n_max + 1, z.size))
    upper = np.zeros(z.size)
    current = np.ones(z.size)
    norm = np.zeros(z.size)
    two_over_z = 2.0 / z
    for k in range(start, 0, -1):
        lower = k * two_over_z * current - upper
        upper, current = current, lower
        order = k - 1
        big = np.abs(current) > _RESCALE
        if big.any():
            current[big] /= _RESCALE
            upper[big] /= _RESCALE
            norm[big] /= _RESCALE
            table[:, big] /= _RESCALE
        if order <= n_max:
            table[order] = current
        if order % 2 == 0:
            norm += current if order == 0 else 2.0 * current
    return table / norm


def _j_rows(n_max, flat, orders):
    """J_k(flat) for k in orders (all <= n_max), branch by argument size."""
    out = np.zeros((len(orders), flat.size))
    zero = flat == 0.0
    small = (flat > 0.0) & (flat <= SERIES_SWITCH)
    large = flat >= max(ASYMPTOTIC_SWITCH, 2.0 * n_max * n_max)
    middle = ~(zero | small | large)
    for row, k in enumerate(orders):
        if k == 0:
            out[row, zero] = 1.0
        if small.any():
            out[row, small] = _j_series(k, flat[small])
        if large.any():
            out[row, large] = _j_hankel(k, flat[large])
    if middle.any():
        table = _j_miller(n_max, flat[middle])
        out[:, middle] = table[list(orders)]
    return out


def bessel_j(n, z):
    """J_n(z) for integer 0 <= n <= 200 and 0 <= z <= 1e6 (scalar or array z)."""
    n = _check_order(n, J_MAX_ORDER, "Bessel J")
    z, flat = _as_flat(z)
    _check_argument(flat, J_MAX_ARGUMENT, "Bessel J")
    return _restore(_j_rows(n, flat, [n])[0], z)


def bessel_j_table(n_max, z):
    """Array of shape (n_max + 1,) + shape(z) holding J_0(z) .. J_{n_max}(z)."""
    n_max = _check_order(n_max, TABLE_MAX_ORDER, "Bessel J table")
    z, flat = _as_flat(z)
    _check_argument(flat, TABLE_MAX_ARGUMENT, "Bessel J table")
    rows = _j_rows(n_max, flat, list(range(n_max + 1)))
    return rows.reshape((n_max + 1,) + z.shape)


def hankel_envelope(n, terms=4):
    """Large-argument form of J_n as an OscillatoryEnvelope.

    J_n(z) ~ sqrt(2/(pi z)) * (P cos(chi) - Q sin(chi)), chi = z - n pi/2 - pi/4.
    """
    mu = 4.0 * n * n
    base = math.sqrt(2.0 / math.pi)
    chi_shift = (0.5 * n + 0.25) * math.pi
    coefficient = 1.0
    parts = [(base, 0.5, chi_shift)]
    for k in range(1, terms):
        coefficient *= (mu - (2 * k - 1) ** 2) / (8.0 * k)
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2:
            # -Q sin(chi) = -Q cos(chi - pi/2)
            parts.append((-sign * base * coefficient, 0.5 + k, chi_shift + 0.5 * math.pi))
        else:
            parts.append((sign * base * coefficient, 0.5 + k, chi_shift))
    return OscillatoryEnvelope(terms=tuple(parts), order=int(n))


@dataclass(frozen=True)
class BesselAsymptotic:
    """Leading cosine form of J_n and the remainder it leaves."""
    order: int

    def leading(self, z):
        z = np.asarray(z, dtype=float)
        value = np.sqrt(2.0 / (math.pi * z)) * np.cos(z - 0.5 * math.pi * self.order - 0.25 * math.pi)
        return float(value) if value.ndim == 0 else value

    def remainder(self, z):
        return bessel_j(self.order, z) - self.leading(z)


def bessel_j_asymptotic(n, z):
    """(leading, remainder) with J_n(z) = leading + remainder, for z >= 1."""
    n = _check_order(n, J_MAX_ORDER, "Bessel J")
    if np.any(np.asarray(z, dtype=float) < 1.0):
        raise DomainError("asymptotic split needs z >= 1")
    form = BesselAsymptotic(n)
    return form.leading(z), form.remainder(z)


def bessel_j0_two_term(z):
    """sqrt(2/(pi z)) cos(z - pi/4) + sqrt(2) sin(z - pi/4) / (8 sqrt(pi) z^(3/2))."""
    z = np.asarray(z, dtype=float)
    value = (np.sqrt(2.0 / (math.pi * z)) * np.cos(z - 0.25 * math.pi)
             + math.sqrt(2.0) / (8.0 * math.sqrt(math.pi)) * z ** -1.5 * np.sin(z - 0.25 * math.pi))
    return float(value) if value.ndim == 0 else value


# --- scaled Bessel I ----------------------------------------------------------

def _i_miller(n_max, z):
    """Rows e^-z I_0 .. e^-z I_{n_max} for positive z."""
    start = n_max + int(math.sqrt(80.0 * (float(np.max(z)) + 1.0))) + 40
    table = np.zeros((n_max + 1, z.size))
    upper = np.zeros(z.size)
    current = np.ones(z.size)
    norm = np.zeros(z.size)
    two_over_z = 2.0 / z
    for k in range(start, 0, -1):
        lower = k * two_over_z * current + upper
        upper, current = current, lower
        order = k - 1
        big = current > _RESCALE
        if big.any():
            current[big] /= _RESCALE
            upper[big] /= _RESCALE
            norm[big] /= _RESCALE
            table[:, big] /= _RESCALE
        if order <= n_max:
            table[order] = current
        norm += current if order == 0 else 2.0 * current
    return table / norm


def _i_rows(n_max, flat):
    out = np.zeros((n_max + 1, flat.size))
    zero = flat == 0.0
    out[0, zero] = 1.0
    positive = ~zero
    if positive.any():
        out[:, positive] = _i_miller(n_max, flat[positive])
    return out


def bessel_i(n, z):
    """Exponentially scaled e^-z I_n(z) for 0 <= n <= 400, 0 <= z <= 1e4."""
    n = _check_order(n, I_MAX_ORDER, "Bessel I")
    z, flat = _as_flat(z)
    _check_argument(flat, I_MAX_ARGUMENT, "Bessel I")
    return _restore(_i_rows(n, flat)[n], z)


def bessel_i_table(n_max, z):
    """Array of shape (n_max + 1,) + shape(z) holding e^-z I_k(z), k = 0..n_max."""
    n_max = _check_order(n_max, TABLE_MAX_ORDER, "Bessel I table")
    z, flat = _as_flat(z)
    _check_argument(flat, TABLE_MAX_ARGUMENT, "Bessel I table")
    return _i_rows(n_max, flat).reshape((n_max + 1,) + z.shape)


# --- exponential integral and Euler's constant --------------------------------

def _e1_continued_fraction(x):
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h * math.exp(-x)
    raise ConvergenceError(f"E1 continued fraction did not converge at x={x}", estimates=(h,))


@lru_cache(maxsize=1)
def _e1_at_one():
    return _e1_continued_fraction(1.0)


def _e1_scalar(x):
    if x >= 1.0:
        return _e1_continued_fraction(x)
    # E1(x) = E1(1) - ln x + sum_k (-1)^k (1 - x^k) / (k k!)
    total = 0.0
    factorial = 1.0
    power = 1.0
    for k in range(1, 60):
        factorial *= k
        power *= x
        term = (1.0 - power) / (k * factorial)
        total += -term if k % 2 else term
        if 1.0 / (k * factorial) < 1e-18:
            break
    return _e1_at_one() - math.log(x) + total


def exp_integral_e1(x):
    """E1(x) = int_x^inf e^-u / u du for x > 0 (scalar or array)."""
    x, flat = _as_flat(x)
    if np.any(flat <= 0):
        raise DomainError("E1 is defined for x > 0 only")
    values = np.array([_e1_scalar(float(v)) for v in flat])
    return _restore(values, x)


@lru_cache(maxsize=1)
def euler_gamma():
    """Euler's constant from int_0^1 (1 - e^-z)/z dz - int_1^inf e^-z/z dz."""
    head = 0.0
    factorial = 1.0
    for k in range(1, 60):
        factorial *= k
        term = 1.0 / (k * factorial)
        head += term if k % 2 else -term
        if term < 1e-18:
            break
    return head - _e1_at_one()


@lru_cache(maxsize=1)
def euler_gamma_via_bessel():
    """Euler's constant from int_0^1 (1 - J_0)/z - int_1^inf J_0/z + ln 2."""

    def near(z):
        return (1.0 - bessel_j(0, z)) / z

    def far(z):
        return bessel_j(0, z) / z

    head = gauss_legendre(near, 0.0, 1.0, 32)
    tail = semi_infinite_integral(far, hankel_envelope(0, 6).divided_by_power(1.0), 1.0, order=24)
    return head - tail + math.log(2.0)


# --- derivatives of the Gaussian H(y) = exp(-|y|^2/4) / (4 pi) ----------------

@lru_cache(maxsize=None)
def _gaussian_factor(k):
    """Coefficients of p_k with d^k/du^k exp(-u^2/4) = p_k(u) exp(-u^2/4)."""
    if k == 0:
        return (1.0,)
    previous = np.array(_gaussian_factor(k - 1))
    current = P.polysub(P.polyder(previous) if previous.size > 1 else [0.0], 0.5 * P.polymulx(previous))
    return tuple(float(c) for c in current)


@dataclass(frozen=True)
class GaussianDerivative:
    """Exact partial derivative d^k1_1 d^k2_2 of H, as polynomial times Gaussian."""
    k1: int
    k2: int

    def __post_init__(self):
        for k in (self.k1, self.k2):
            if int(k) != k or k < 0:
                raise DomainError(f"derivative orders must be non-negative integers, got {k}")
        if self.k1 + self.k2 > GAUSSIAN_MAX_ORDER:
            raise EnvelopeError(
                f"derivative order {self.k1 + self.k2} exceeds the supported limit {GAUSSIAN_MAX_ORDER}",
                limit=GAUSSIAN_MAX_ORDER,
            )

    def __call__(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        value = (P.polyval(y1, _gaussian_factor(self.k1)) * P.polyval(y2, _gaussian_factor(self.k2))
                 * np.exp(-0.25 * (y1 * y1 + y2 * y2)) / (4.0 * math.pi))
        return float(value) if value.ndim == 0 else value


def gaussian_derivative(k1, k2, y):
    """d^k1/dy1^k1 d^k2/dy2^k2 H at y = (y1, y2)."""
    return GaussianDerivative(k1, k2)(y[0], y[1])
