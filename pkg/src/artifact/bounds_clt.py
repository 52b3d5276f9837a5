"""Uniform, nonuniform and mean-metric normal approximation bounds for sums
of independent summands, with their lower-bound constructions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize as spo

from . import tables
from .errors import DomainError, StructuralError, TableLookupError
from .lattice import LatticeDist, lindeberg_osipov_fractions
from .special import INV_SQRT2PI, SQRT2PI, Phi, Phi_inv, phi

OSIPOV_LITERATURE_C = 1.87
OSIPOV_BISECT_XTOL = 1e-10
GCLASS_GRID_POINTS = 400
GCLASS_TOL = 1e-12
ERICKSON_C = 36.0
ZETA3_IID_TERM = 0.1352
ZETA3_FIRST_TERM = 0.0993
ZETA3_SUM_TERM = 0.0665


@dataclass(frozen=True)
class BoundResult:
    value: float
    constant_used: tuple
    variant: str
    assumptions: tuple = field(default=())
    error_bar: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        if not self.value >= 0:
            raise DomainError(f"bound value {self.value!r} is negative")

    def to_dict(self) -> dict:
        name, val = self.constant_used
        out = {"value": self.value, "constant": f"{name}={val:g}", "variant": self.variant,
               "assumptions": list(self.assumptions)}
        if self.error_bar is not None:
            out["error_bar"] = self.error_bar
        return out


# moment data

@dataclass(frozen=True, eq=False)
class MomentProfile:
    """Variances and absolute (2+delta)-moments of independent summands.

    The iid regime stores a single summand and the count n."""

    delta: float
    sigma2: np.ndarray
    beta: np.ndarray
    n: int
    regime: str

    def __post_init__(self):
        if not 0.0 < self.delta <= 1.0:
            raise DomainError("delta must lie in (0, 1]")
        s2 = np.atleast_1d(np.asarray(self.sigma2, dtype=float))
        b = np.atleast_1d(np.asarray(self.beta, dtype=float))
        if s2.shape != b.shape:
            raise DomainError("sigma2 and beta must have the same length")
        if np.any(s2 < 0) or s2.sum() <= 0:
            raise DomainError("variances must be nonnegative with a positive sum")
        lyap = s2 ** (1 + self.delta / 2)
        if np.any(b < lyap * (1 - 1e-12)):
            raise DomainError("moments violate the Lyapunov inequality")
        object.__setattr__(self, "sigma2", s2)
        object.__setattr__(self, "beta", b)

    @classmethod
    def iid(cls, sigma2: float, beta: float, n: int, delta: float = 1.0) -> "MomentProfile":
        if n < 1:
            raise DomainError("n must be a positive integer")
        return cls(delta, [sigma2], [beta], int(n), "iid")

    @classmethod
    def general(cls, pairs: Sequence, delta: float = 1.0) -> "MomentProfile":
        pairs = list(pairs)
        if not pairs:
            raise DomainError("need at least one summand")
        s2, b = zip(*pairs)
        return cls(delta, s2, b, len(pairs), "general")

    @classmethod
    def from_dists(cls, dists: Sequence[LatticeDist], delta: float = 1.0,
                   regime: str = "general") -> "MomentProfile":
        dists = list(dists)
        pairs = []
        for d in dists:
            x = d.support - d.mean
            pairs.append((float(d.weights @ x ** 2), float(d.weights @ np.abs(x) ** (2 + delta))))
        if regime == "iid":
            return cls.iid(pairs[0][0], pairs[0][1], len(pairs), delta)
        return cls.general(pairs, delta)


class Fractions(NamedTuple):
    L: float
    T: float
    B_n: float


def fractions(p: MomentProfile) -> Fractions:
    """Lyapunov fraction L and its variance-only counterpart T."""
    e = 2 + p.delta
    if p.regime == "iid":
        s2, b, n = p.sigma2[0], p.beta[0], p.n
        B = math.sqrt(n * s2)
        return Fractions(b / (s2 ** (e / 2) * n ** (p.delta / 2)), n ** (-p.delta / 2), B)
    B = math.sqrt(p.sigma2.sum())
    return Fractions(float(p.beta.sum()) / B ** e, float((p.sigma2 ** (e / 2)).sum()) / B ** e, B)


# uniform bounds

def _filter_pairs(pairs, s_list, what):
    if s_list is None:
        return pairs
    out = []
    for s in s_list:
        hit = [(ps, c) for ps, c in pairs if abs(ps - s) < 1e-9]
        if not hit:
            raise TableLookupError(f"s={s} is not tabulated for {what}")
        out.append(hit[0])
    return out


def berry_esseen_uniform(p: MomentProfile, variant: str = "best", s_list=None) -> BoundResult:
    """classical: C_0(delta) L; structured: min_s C_s(delta)(L + sT); best: min of both."""
    L, T, _ = fractions(p)
    regime = p.regime
    c0 = tables.classical_constant(p.delta, regime)
    classical = (c0 * L, ("C0", c0), "classical")
    if variant == "classical":
        cands = [classical]
    elif variant in ("structured", "best"):
        pairs = _filter_pairs(tables.structured_constants(p.delta, regime), s_list,
                              f"delta={p.delta} {regime}")
        cands = [(c * (L + s * T), (f"C_{s:g}", c), f"structured s={s:g}") for s, c in pairs]
        if variant == "best":
            cands.append(classical)
    else:
        raise DomainError(f"unknown variant {variant!r}")
    value, const, tag = min(cands, key=lambda c: c[0])
    return BoundResult(value, const, tag, (f"{regime} summands", f"delta={p.delta:g}"))


class CfConstant(NamedTuple):
    value: float
    b: float
    d: float


def _c0_formula(b, d):
    return 2 * INV_SQRT2PI * (b / (1 - 2 * d / 3) ** 1.5 + 2 * b * (b + 1) / (math.pi * d * (b - 1)))


def be_cf_constant(b: float = 2.0, d: float = 0.75, optimize: bool = False) -> CfConstant:
    """Berry-Esseen constant from the smoothing-inequality proof, optionally
    minimized over (b, d) by nested bounded scalar searches."""
    if not optimize:
        if b <= 1 or not 0 < d < 1.5:
            raise DomainError("need b > 1 and 0 < d < 3/2")
        return CfConstant(_c0_formula(b, d), b, d)

    def inner(dd):
        r = spo.minimize_scalar(lambda bb: _c0_formula(bb, dd), bounds=(1 + 1e-9, 50.0),
                                method="bounded", options={"xatol": 1e-10})
        return r.fun, r.x

    r = spo.minimize_scalar(lambda dd: inner(dd)[0], bounds=(1e-6, 1.5 - 1e-9),
                            method="bounded", options={"xatol": 1e-10})
    val, bb = inner(r.x)
    return CfConstant(float(val), float(bb), float(r.x))


class OsipovConstant(NamedTuple):
    C: float
    b: float


def osipov_constant(C0: float) -> OsipovConstant:
    """min over b in (0,1) of the larger of two branches, found at their crossing."""
    if C0 <= 0:
        raise DomainError("C0 must be positive")

    def gap(b):
        rhs = 1 + 4.25 * C0 / b ** 3 + (1 + 2 * math.exp(-0.5) / (1 + b)) / (SQRT2PI * b)
        return 2 / (1 - b * b) - rhs

    b = spo.bisect(gap, 1e-6, 1 - 1e-12, xtol=OSIPOV_BISECT_XTOL)
    return OsipovConstant(2 / (1 - b * b), b)


def _check_centered(dists):
    for d in dists:
        scale = max(1.0, float(np.abs(d.support).max()))
        if abs(d.mean) > 1e-9 * scale:
            raise DomainError("summands must be centered")


def osipov(dists: Sequence[LatticeDist], epsilon: float = 1.0, C0: float = 0.5583,
           constant=None) -> BoundResult:
    """C (L_n(eps) + M_n(eps)); constant='literature' uses C = 1.87."""
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    dists = list(dists)
    _check_centered(dists)
    fr = lindeberg_osipov_fractions(dists, epsilon)
    if constant == "literature":
        C, name = OSIPOV_LITERATURE_C, "C_literature"
    elif constant is None:
        C, name = osipov_constant(C0).C, f"C(C0={C0:g})"
    else:
        C, name = float(constant), "C"
    return BoundResult(C * (fr.L_n_eps + fr.M_n_eps), (name, C), f"osipov eps={epsilon:g}",
                       ("centered summands", "eps = 1 minimizes L_n(eps) + M_n(eps)"))


class GClassFunction:
    """Even g, positive on (0, inf), with g and x/g nondecreasing there.
    Membership is checked on a log-spaced sample, not proved."""

    def __init__(self, g: Callable, declared_domain_max: float = 1e6, name: str = "g"):
        self.g = g
        self.declared_domain_max = declared_domain_max
        self.name = name
        x = np.geomspace(1e-6, declared_domain_max, GCLASS_GRID_POINTS)
        gx = np.array([g(v) for v in x], dtype=float)
        gm = np.array([g(-v) for v in x], dtype=float)
        tol = GCLASS_TOL * np.maximum(1.0, np.abs(gx))
        if np.any(gx <= 0):
            raise StructuralError(f"{name} is not positive on (0, inf)")
        if np.any(np.abs(gx - gm) > tol):
            raise StructuralError(f"{name} is not even")
        if np.any(np.diff(gx) < -tol[1:]):
            raise StructuralError(f"{name} is not nondecreasing")
        r = x / gx
        if np.any(np.diff(r) < -GCLASS_TOL * np.maximum(1.0, r[1:])):
            raise StructuralError(f"x/{name}(x) is not nondecreasing")

    def __call__(self, x):
        return self.g(x)


def g_lower(a: float) -> GClassFunction:
    return GClassFunction(lambda x: min(1.0, abs(x) / a), name=f"min(1,|x|/{a:g})")


def g_upper(a: float) -> GClassFunction:
    return GClassFunction(lambda x: max(1.0, abs(x) / a), name=f"max(1,|x|/{a:g})")


def _B(dists):
    return math.sqrt(sum(float(d.weights @ d.support ** 2) for d in dists))


def _sum_x2g(dists, g):
    total = 0.0
    for d in dists:
        x, w = d.atoms()
        total += float(sum(wi * xi * xi * g(xi) for xi, wi in zip(x, w)))
    return total


def katz_petrov(dists: Sequence[LatticeDist], g: GClassFunction, A: float | None = None) -> BoundResult:
    """A sum E X_k^2 g(X_k) / (B_n^2 g(B_n)); A defaults to the Osipov constant."""
    if not isinstance(g, GClassFunction):
        g = GClassFunction(g)
    dists = list(dists)
    _check_centered(dists)
    if A is None:
        A = osipov_constant(0.5583).C
    B = _B(dists)
    val = A * _sum_x2g(dists, g) / (B * B * g(B))
    return BoundResult(val, ("A", A), f"katz_petrov g={g.name}", ("centered summands",))


# nonuniform bounds

def nonuniform_bound(p: MomentProfile | None, x: float, variant: str = "nagaev_bikelis",
                     s_list=None, dists=None, A: float | None = None, g=None,
                     regime: str | None = None) -> BoundResult:
    ax = abs(x)
    if variant == "nagaev_bikelis":
        L, T, _ = fractions(p)
        pairs = _filter_pairs(tables.nonuniform_constants(p.delta, p.regime), s_list,
                              f"delta={p.delta} {p.regime}")
        den = 1 + ax ** (2 + p.delta)
        value, s, K = min((K * (L + s * T) / den, s, K) for s, K in pairs)
        return BoundResult(value, (f"K_{s:g}", K), "nagaev_bikelis", (f"{p.regime} summands",))
    if dists is None:
        raise DomainError(f"{variant} needs the summand laws")
    dists = list(dists)
    _check_centered(dists)
    regime = regime or (p.regime if p is not None else "general")
    if A is None:
        A = tables.bikelis_A(regime, ax)
    B = _B(dists)
    c = (1 + ax) * B
    if variant == "bikelis":
        total = 0.0
        for d in dists:
            xs, w = d.atoms()
            big = np.abs(xs) > c
            total += float(w[big] @ xs[big] ** 2) / c ** 2 + float(w[~big] @ np.abs(xs[~big]) ** 3) / c ** 3
        return BoundResult(A * total, ("A", A), "bikelis", ("centered summands",))
    if variant == "petrov":
        if g is None:
            raise DomainError("petrov needs a function g")
        if not isinstance(g, GClassFunction):
            g = GClassFunction(g)
        val = A * _sum_x2g(dists, g) / (c * c * g(c))
        return BoundResult(val, ("A", A), f"petrov g={g.name}", ("centered summands",))
    raise DomainError(f"unknown variant {variant!r}")


# lower bounds

def hipp_mattner(n: int) -> float:
    """Exact uniform distance for the standardized sum of n symmetric signs."""
    if n < 1:
        raise DomainError("n must be a positive integer")
    if n % 2:
        return float(Phi(1 / math.sqrt(n))) - 0.5
    return math.comb(n, n // 2) / 2 ** (n + 1)


def nonuniform_minorant(delta: float, p: float) -> float:
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if not 0 <= delta <= 1:
        raise DomainError("delta must lie in [0, 1]")
    q = 1 - p
    ratio = (p ** (1 + delta / 2) + q ** (1 + delta / 2)) / (p ** (1 + delta) + q ** (1 + delta))
    return q ** (delta / 2) * ratio * abs(1 - float(Phi(-math.sqrt(q / p))) / p)


def lower_bounds(kind: str, n: int | None = None, m: int | None = None, gamma: float | None = None,
                 delta: float | None = None, p: float | None = None) -> float:
    if kind == "clt_sqrt2pi":
        return INV_SQRT2PI
    if kind == "esseen":
        return (math.sqrt(10) + 3) / (6 * SQRT2PI)
    if kind == "hipp_mattner":
        return hipp_mattner(n)
    if kind == "inf_cs":
        if gamma is None or gamma <= 0 or m is None or m < 0:
            raise DomainError("inf_cs needs gamma > 0 and integer m >= 0")
        k = np.arange(m + 1)
        poisson_cdf = float(np.exp(-gamma + k * math.log(gamma) - np.array([math.lgamma(j + 1) for j in k])).sum())
        return math.sqrt(gamma) * (poisson_cdf - float(Phi((m - gamma) / math.sqrt(gamma))))
    if kind == "nonuniform_minorant":
        return nonuniform_minorant(delta, p)
    raise DomainError(f"unknown lower bound {kind!r}")


# mean metric

def psi_two_point(p: float) -> float:
    """Exact zeta_1 distance between the standardized two-point law and N(0,1)."""
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    if p > 0.5:
        p = 1 - p
    q = 1 - p
    a, b = math.sqrt(q / p), math.sqrt(p / q)
    return (2 * a * Phi(a) + 2 * b * Phi(b) + 2 * phi(a) + 2 * phi(b)
            - 2 * phi(Phi_inv(q)) - 2 * (1 - p * q) / math.sqrt(p * q))


def zeta1_minorant(delta: float, p: float) -> float:
    q = 1 - p
    return (p * q) ** (delta / 2) * psi_two_point(p) / (p ** (1 + delta) + q ** (1 + delta))


def mean_metric_coefficient(delta: float) -> float:
    if not 0 <= delta <= 1:
        raise DomainError("delta must lie in [0, 1]")
    return 2 / (1 + delta) * (math.pi / 2) ** ((1 - delta) / 2)


def zeta1_bounds(data=None, variant: str = "erickson", C: float = ERICKSON_C,
                 delta: float | None = None, pp: float | None = None) -> BoundResult:
    if variant == "erickson":
        dists = list(data)
        _check_centered(dists)
        B = _B(dists)
        total = sum(float(sum(w * x * x * min(abs(x), B) for x, w in zip(*d.atoms()))) for d in dists)
        return BoundResult(C * total / B ** 3, ("C", C), "erickson", ("centered summands",))
    if variant == "mean_metric_constant":
        if isinstance(data, MomentProfile):
            delta = data.delta
        coef = mean_metric_coefficient(delta)
        val = coef * fractions(data).L if isinstance(data, MomentProfile) else coef
        return BoundResult(val, (f"C({delta:g})", coef), "mean_metric_constant")
    if variant == "lower_psi":
        d = 1.0 if delta is None else delta
        val = zeta1_minorant(d, pp)
        return BoundResult(val, ("psi", psi_two_point(pp)), f"lower_psi p={pp:g}",
                           ("minorant of the mean-metric constant",))
    raise DomainError(f"unknown variant {variant!r}")


# higher zeta metrics

class ExtremalTwoPoint(NamedTuple):
    p: float
    A: float


def extremal_two_point(rho: float) -> ExtremalTwoPoint:
    """Two-point law with E|X|^3/sigma^3 = rho and its ratio |EX^3|/E|X|^3."""
    if rho < 1:
        raise DomainError("rho >= 1 by the Lyapunov inequality")
    if rho == 1:
        return ExtremalTwoPoint(0.5, 0.0)

    def f(p):
        q = 1 - p
        return (p * p + q * q) / math.sqrt(p * q) - rho

    p = spo.bisect(f, 1e-300 ** 0.5, 0.5, xtol=1e-15, rtol=1e-15)
    q = 1 - p
    return ExtremalTwoPoint(p, (q - p) / math.sqrt(p * q) / rho)


def zeta_high_bounds(p: MomentProfile, order: str = "two") -> BoundResult:
    L, _, B = fractions(p)
    if order == "two_plus_delta":
        c = 1 / ((1 + p.delta) * (2 + p.delta))
        return BoundResult(c * L, ("1/((1+d)(2+d))", c), order)
    if p.delta != 1.0:
        raise DomainError(f"order {order!r} needs third moments (delta = 1)")
    if order == "two":
        c = SQRT2PI / 8
        return BoundResult(c * L, ("sqrt(2pi)/8", c), order)
    if order != "three_refined":
        raise DomainError(f"unknown order {order!r}")
    if p.regime == "iid":
        rho = p.beta[0] / p.sigma2[0] ** 1.5
        A = extremal_two_point(rho).A
        val = rho * A / (6 * math.sqrt(p.n)) + ZETA3_IID_TERM / p.n
        return BoundResult(val, ("A(rho)", A), "three_refined iid")
    order_idx = np.argsort(-p.sigma2, kind="stable")
    s3 = p.sigma2[order_idx] ** 1.5
    b3 = p.beta[order_idx]
    B3 = B ** 3
    As = [extremal_two_point(b / s).A for b, s in zip(b3, s3)]
    main = float(np.dot(b3, As)) / (6 * B3)
    k = np.arange(1, s3.size)
    val = main + ZETA3_FIRST_TERM * s3[0] / B3 + ZETA3_SUM_TERM / B3 * float((s3[1:] / np.sqrt(k)).sum())
    return BoundResult(val, ("max A(rho_k)", max(As)), "three_refined general",
                       ("summands ordered by decreasing variance",))
