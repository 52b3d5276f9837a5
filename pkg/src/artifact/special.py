"""Scalar special functions: normal law, gamma ratios, Wendel bracket, I0,
and the closed-form extremal distances between shifted/scaled normals."""

from __future__ import annotations

import math
from typing import Callable, NamedTuple

import numpy as np
from scipy import special as sc

from .errors import DomainError

# tolerances used across the package, kept in one place
TAIL_EPSILON = 1e-12
COMMENSURABILITY_RTOL = 1e-9
ZETA1_BISECT_XTOL = 1e-12
GRID_POINTS = 2001
I0_SERIES_RTOL = 1e-16

SQRT2PI = math.sqrt(2.0 * math.pi)
INV_SQRT2PI = 1.0 / SQRT2PI


def Phi(x):
    """Standard normal cdf (erfc based, accurate deep in both tails)."""
    return sc.ndtr(x)


def phi(x):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x) * INV_SQRT2PI
    return out if out.ndim else float(out)


def Phi_inv(u):
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise DomainError("normal quantile needs an argument in (0, 1)")
    out = sc.ndtri(u)
    return out if out.ndim else float(out)


def Phi_integral(x):
    """Antiderivative of Phi vanishing at -inf: x*Phi(x) + phi(x)."""
    return x * Phi(x) + phi(x)


def Phi_tail_integral(x):
    """Integral of 1 - Phi over (x, inf): phi(x) - x*(1 - Phi(x))."""
    return phi(x) - x * Phi(-x)


class StdNormal(NamedTuple):
    cdf: float
    pdf: float
    quantile_inverse: Callable


def std_normal(x: float) -> StdNormal:
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    return StdNormal(float(Phi(x)), float(phi(x)), Phi_inv)


class GammaFns(NamedTuple):
    log_gamma: float
    gamma_ratio: Callable


def gamma_fns(x: float) -> GammaFns:
    if x <= 0:
        raise DomainError("gamma functions need x > 0")

    def gamma_ratio(s: float) -> float:
        """Gamma(x+s)/Gamma(x)."""
        if x + s <= 0:
            raise DomainError("x + s must be positive")
        if s == 1:
            return float(x)
        return math.exp(math.lgamma(x + s) - math.lgamma(x))

    return GammaFns(math.lgamma(x), gamma_ratio)


class Bracket(NamedTuple):
    lower: float
    upper: float


def wendel_bounds(x: float, s: float) -> Bracket:
    """Bracket for Gamma(x+s) / (x**s Gamma(x)), x > 0, 0 <= s <= 1."""
    if x <= 0:
        raise DomainError("x must be positive")
    if not 0.0 <= s <= 1.0:
        raise DomainError("s must lie in [0, 1]")
    return Bracket((x / (x + s)) ** (1.0 - s), 1.0)


def wendel_ratio(x: float, s: float) -> float:
    return math.exp(math.lgamma(x + s) - math.lgamma(x) - s * math.log(x))


def bessel_i0(x: float) -> float:
    """Modified Bessel I0 by its power series."""
    if x < 0:
        raise DomainError("I0 is evaluated for x >= 0 only")
    y = 0.25 * x * x
    term, total, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= y / (k * k)
        total += term
        if term < I0_SERIES_RTOL * total:
            return total


class Extremal(NamedTuple):
    exact: float
    bounds: tuple


def normal_extremal_distance(kind: str, value: float) -> Extremal:
    """sup_x |Phi(x+q) - Phi(x)| (kind='shift') or sup_x |Phi(px) - Phi(x)|
    (kind='scale'), with the two elementary upper bounds."""
    if kind == "shift":
        q = abs(value)
        return Extremal(float(2.0 * Phi(q / 2.0) - 1.0), (q * INV_SQRT2PI,))
    if kind == "scale":
        p = value
        if p <= 0:
            raise DomainError("scale factor must be positive")
        b1 = math.sqrt(max((p - 1.0) * math.log(p), 0.0) / math.pi)
        b2 = (max(p, 1.0 / p) - 1.0) / math.sqrt(2.0 * math.pi * math.e)
        if p == 1.0:
            return Extremal(0.0, (0.0, 0.0))
        # stationary point of Phi(px) - Phi(x): p*phi(px) = phi(x)
        x2 = math.sqrt(2.0 * math.log(p) / (p * p - 1.0))
        return Extremal(abs(float(Phi(p * x2) - Phi(x2))), (b1, b2))
    raise DomainError(f"unknown extremal kind {kind!r}")
