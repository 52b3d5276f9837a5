"""Characteristic functions: catalog, Taylor remainders, inversion, and the
Feller and Prawitz smoothing bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate
from scipy import special as sc

from .errors import DomainError, NumericError
from .lattice import LatticeDist
from .special import GRID_POINTS

QUAD_EPSABS = 1e-11
MACLAURIN_CUTOFF = 1e-4
KERNEL_MIN_T = 1e-8
PRAWITZ_T_GRID = np.geomspace(1.0, 400.0, 25)
PRAWITZ_T0_GRID = np.linspace(0.1, 1.0, 10)


@dataclass(frozen=True, eq=False)
class CharFn:
    fn: Callable
    is_symmetric: bool = False
    abs_integrable: bool = False
    description: str = ""
    atoms: tuple | None = None  # (values, weights) for purely atomic laws

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def eval(self, t):
        return self(t)


def _normal(a=0.0, sigma=1.0):
    return CharFn(lambda t: np.exp(1j * t * a - 0.5 * sigma ** 2 * t * t),
                  a == 0.0, True, f"normal({a}, {sigma})")


def _gamma(alpha, lam):
    if alpha <= 0 or lam <= 0:
        raise DomainError("gamma parameters must be positive")
    return CharFn(lambda t: (lam / (lam - 1j * t)) ** alpha, False, alpha > 1,
                  f"gamma({alpha}, {lam})")


def _exponential(lam):
    return _gamma(1.0, lam)


def _laplace(lam):
    if lam <= 0:
        raise DomainError("Laplace parameter must be positive")
    return CharFn(lambda t: lam ** 2 / (lam ** 2 + t * t) + 0j, True, True, f"laplace({lam})")


def _triangular():
    return CharFn(lambda t: np.clip(1.0 - np.abs(t), 0.0, None) + 0j, True, True,
                  "density (1 - cos x)/(pi x^2)")


def _uniform(a=0.0, b=1.0):
    if not b > a:
        raise DomainError("uniform needs a < b")

    def fn(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t == 0, 1.0, t)
        val = (np.exp(1j * safe * b) - np.exp(1j * safe * a)) / (1j * safe * (b - a))
        return np.where(t == 0, 1.0 + 0j, val)

    return CharFn(fn, a == -b, False, f"uniform({a}, {b})")


def _cauchy():
    return CharFn(lambda t: np.exp(-np.abs(t)) + 0j, True, True, "cauchy")


def _compound_poisson(lam, inner: CharFn):
    if lam <= 0:
        raise DomainError("Poisson rate must be positive")
    return CharFn(lambda t: np.exp(lam * (inner(t) - 1.0)), inner.is_symmetric, False,
                  f"compound_poisson({lam}, {inner.description})")


def lattice_cf(d: LatticeDist) -> CharFn:
    x, w = d.atoms()

    def fn(t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * np.multiply.outer(t, x)) @ w

    sym = bool(np.allclose(x, -x[::-1], atol=1e-12) and np.allclose(w, w[::-1], atol=1e-15))
    return CharFn(fn, sym, False, repr(d), (x, w))


_CATALOG = {
    "normal": _normal,
    "gamma": _gamma,
    "exponential": _exponential,
    "laplace": _laplace,
    "triangular": _triangular,
    "uniform": _uniform,
    "cauchy": _cauchy,
    "compound_poisson": _compound_poisson,
    "lattice": lattice_cf,
}


def cf_catalog(name: str, **params) -> CharFn:
    if name not in _CATALOG:
        raise DomainError(f"unknown characteristic function family {name!r}")
    return _CATALOG[name](**params)


# Taylor remainders of e^{ix}

class Remainder(NamedTuple):
    remainder_abs: float
    bound: float


def _remainder(x: float, n: int) -> complex:
    """e^{ix} - sum_{k<n} (ix)^k/k!, summed as a tail series for small |x|."""
    if abs(x) < 2.0:
        term = (1j * x) ** n / math.factorial(n)
        total, k = 0j, n
        while abs(term) > 1e-300:
            total += term
            k += 1
            term *= 1j * x / k
            if abs(term) < 1e-18 * abs(total):
                break
        return total
    partial = sum((1j * x) ** k / math.factorial(k) for k in range(n))
    return complex(np.exp(1j * x)) - partial


def taylor_remainder(x: float, n: int, variant: str = "plain", delta: float = 1.0) -> Remainder:
    """plain: |r_{n+1}(x)| against 2^{1-delta}/prod(k+delta) |x|^{n+delta};
    prawitz: |r_n(x) - n/(2(n+1)) (ix)^n/n!| against (n+2)/(2(n+1)) |x|^n/n!."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    if variant == "plain":
        if not 0.0 < delta <= 1.0:
            raise DomainError("delta must lie in (0, 1]")
        c = 2.0 ** (1.0 - delta) / math.prod(k + delta for k in range(1, n + 1))
        return Remainder(abs(_remainder(x, n + 1)), c * abs(x) ** (n + delta))
    if variant == "prawitz":
        if n < 1:
            raise DomainError("the refined remainder needs n >= 1")
        lead = (1j * x) ** n / math.factorial(n)
        r = _remainder(x, n) - n / (2.0 * (n + 1)) * lead
        return Remainder(abs(r), (n + 2) / (2.0 * (n + 1)) * abs(x) ** n / math.factorial(n))
    raise DomainError(f"unknown remainder variant {variant!r}")


# inversion

def _wynn_epsilon(s):
    """Wynn epsilon extrapolation of a sequence of partial sums."""
    e_prev = np.zeros(len(s) + 1)
    e = np.array(s, dtype=float)
    best = e[-1]
    for k in range(1, len(s)):
        diff = e[1:] - e[:-1]
        if np.any(diff == 0):
            break
        e_new = e_prev[1:len(e)] + 1.0 / diff
        e_prev, e = e, e_new
        if k % 2 == 0:
            best = e[-1]
    return float(best)


def invert_cdf(f: CharFn, x: float, T_max: float | None = None, h_min: float = 0.0) -> float:
    """(F(x+0) + F(x-0))/2 from the principal-value inversion integral.

    Pairing t with -t makes the integrand -Im(e^{-itx} f(t))/t on (0, inf).
    Purely atomic laws are integrated term by term through the sine integral
    since their integrand does not decay."""
    if f.atoms is not None:
        vals, w = f.atoms
        dk = vals - x
        if T_max is None:
            upper = np.sign(dk) * (np.pi / 2)
        else:
            upper = sc.sici(T_max * dk)[0]
        lower = sc.sici(h_min * dk)[0] if h_min > 0 else 0.0
        return float(0.5 - (w @ (upper - lower)) / np.pi)

    def g(t):
        return -float(np.imag(np.exp(-1j * t * x) * f(t))) / t

    width = np.pi / max(1.0, abs(x))
    a = max(h_min, 0.0)
    partial, sums, small = 0.0, [], 0
    limit = np.inf if T_max is None else T_max
    while a < limit and len(sums) < 20000:
        b = min(a + width, limit)
        val, _ = integrate.quad(g, a, b, epsabs=QUAD_EPSABS, limit=200)
        partial += val
        sums.append(partial)
        small = small + 1 if abs(val) < 1e-14 else 0
        if small >= 5:
            break
        a = b
    if T_max is None and small < 5:
        tail = sums[-min(len(sums), 41):]
        est = _wynn_epsilon(tail)
        if not np.isfinite(est) or abs(est - sums[-1]) > 1e-3:
            raise NumericError("inversion integral did not converge",
                               {"partial": sums[-1], "extrapolated": est, "panels": len(sums)})
        partial = est
    return 0.5 + partial / np.pi


# smoothing bounds

def _diff_over_t(f: CharFn, g: CharFn):
    """t -> |f(t) - g(t)|/t with its two-term Maclaurin value near zero."""
    h = MACLAURIN_CUTOFF
    dp = complex(f(h) - g(h))
    dm = complex(f(-h) - g(-h))
    d1 = (dp - dm) / (2 * h)
    d2 = (dp + dm) / (h * h)

    def q(t):
        if t < h:
            return abs(d1 + 0.5 * d2 * t)
        return abs(complex(f(t) - g(t))) / t

    return q


def _quad_panels(fun, a, b, width):
    edges = np.linspace(a, b, max(2, int(math.ceil((b - a) / width)) + 1))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(fun, lo, hi, epsabs=QUAD_EPSABS, epsrel=1e-10, limit=200)
        total += val
    return total


def feller_bound(f: CharFn, g: CharFn, A: float, T: float, b: float) -> float:
    """(b/2pi) int_{-T}^{T} |f-g|/|t| dt + 4b(b+1)A/(pi(b-1)T); A = sup|G'|."""
    if b <= 1:
        raise DomainError("b must exceed 1")
    if T <= 0 or A <= 0:
        raise DomainError("T and A must be positive")
    integral = _quad_panels(_diff_over_t(f, g), 0.0, T, 1.0)
    return b / np.pi * integral + 4 * b * (b + 1) * A / (np.pi * (b - 1) * T)


def _kernel(t):
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    cot = np.cos(np.pi * at) / np.sin(np.pi * (1.0 - at)) * np.sign(t)
    return 0.5 * (1 - at) + 0.5j * ((1 - at) * cot + np.sign(t) / np.pi)


def prawitz_kernel(t):
    t_arr = np.asarray(t, dtype=float)
    if np.any((np.abs(t_arr) >= 1.0) | (np.abs(t_arr) < KERNEL_MIN_T)):
        raise DomainError("kernel is defined for 0 < |t| < 1")
    out = _kernel(t_arr)
    return complex(out) if out.ndim == 0 else out


def prawitz_rho_bound(f: CharFn, T: float, t0: float) -> float:
    """Prawitz upper bound on sup|F - Phi| for given T > 0 and t0 in (0, 1]."""
    if T <= 0:
        raise DomainError("T must be positive")
    if not 0.0 < t0 <= 1.0:
        raise DomainError("t0 must lie in (0, 1]")

    def i1(t):
        t = max(t, KERNEL_MIN_T)
        return abs(_kernel(t)) * abs(complex(f(T * t)) - math.exp(-0.5 * (T * t) ** 2))

    def i2(t):
        return abs(_kernel(min(t, 1.0 - 1e-15))) * abs(complex(f(T * t)))

    def i3(t):
        t = max(t, KERNEL_MIN_T)
        return abs(_kernel(t) - 0.5j / (np.pi * t)) * math.exp(-0.5 * (T * t) ** 2)

    width = min(1.0, 2.0 / T)
    total = 2 * _quad_panels(i1, 0.0, t0, width)
    if t0 < 1.0:
        total += 2 * _quad_panels(i2, t0, 1.0, width)
    total += 2 * _quad_panels(i3, 0.0, t0, width)
    total += sc.exp1(0.5 * (T * t0) ** 2) / (2 * np.pi)
    if not np.isfinite(total):
        raise NumericError("Prawitz quadrature failed", {"T": T, "t0": t0})
    return float(total)


class PrawitzOptimum(NamedTuple):
    bound: float
    T: float
    t0: float


def optimize_prawitz(f: CharFn, T_grid=PRAWITZ_T_GRID, t0_grid=PRAWITZ_T0_GRID) -> PrawitzOptimum:
    best = PrawitzOptimum(np.inf, np.nan, np.nan)
    for T in T_grid:
        for t0 in t0_grid:
            val = prawitz_rho_bound(f, float(T), float(t0))
            if val < best.bound:
                best = PrawitzOptimum(val, float(T), float(t0))
    return best


class CltCfBounds(NamedTuple):
    modulus_bound: float
    diff_bound: float


def clt_cf_bounds(L3: float, t: float, d: float) -> CltCfBounds:
    """Bounds on |f_n(t)| and |f_n(t) - e^{-t^2/2}| for a normalized sum with
    Lyapunov fraction L3; the second one holds for |t| <= d / L3."""
    if L3 <= 0 or d <= 0:
        raise DomainError("L3 and d must be positive")
    if abs(t) > d / L3 * (1 + 1e-12):
        raise DomainError("|t| must not exceed d / L3")
    a = abs(t)
    return CltCfBounds(math.exp(-a * a / 2 + L3 * a ** 3 / 3),
                       2 * L3 * a ** 3 * math.exp(-(a * a / 2) * (1 - 2 * d / 3)))


def default_grid(lo: float, hi: float, n: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(lo, hi, n)
