"""Exact finite-lattice distributions: construction, moments, convolution,
compounding and exact distances. This is the ground-truth oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, StructuralError
from .special import (COMMENSURABILITY_RTOL, TAIL_EPSILON, Phi, Phi_integral,
                      Phi_inv, Phi_tail_integral)

_NORMALIZATION_TOL = 1e-12
_MAX_DENOMINATOR = 1000
_MAX_GRID = 50_000_000


@dataclass(frozen=True, eq=False)
class LatticeDist:
    """Mass weights[k] at offset + k*step, plus truncated mass tail_mass_bound."""

    offset: float
    step: float
    weights: np.ndarray
    tail_mass_bound: float = 0.0

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise DomainError("weights must be a non-empty 1-d sequence")
        if not self.step > 0:
            raise DomainError("step must be positive")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        if self.tail_mass_bound < 0:
            raise DomainError("tail_mass_bound must be nonnegative")
        total = w.sum() + self.tail_mass_bound
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise DomainError(f"total mass {total!r} is not 1")
        nz = np.flatnonzero(w)
        offset = float(self.offset)
        if nz.size and (nz[0] > 0 or nz[-1] < w.size - 1):
            offset += nz[0] * self.step
            w = w[nz[0]:nz[-1] + 1]
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "tail_mass_bound", float(self.tail_mass_bound))

    @property
    def support(self) -> np.ndarray:
        return self.offset + self.step * np.arange(self.weights.size)

    @property
    def mean(self) -> float:
        return float(self.weights @ self.support)

    @property
    def variance(self) -> float:
        x = self.support - self.mean
        return float(self.weights @ (x * x))

    def atoms(self):
        """(values, weights) of the atoms carrying positive mass."""
        nz = self.weights > 0
        return self.support[nz], self.weights[nz]

    def affine(self, shift: float, scale: float) -> "LatticeDist":
        """Law of shift + scale * X."""
        if scale == 0:
            raise DomainError("scale must be nonzero")
        if scale > 0:
            return LatticeDist(shift + scale * self.offset, scale * self.step,
                               self.weights, self.tail_mass_bound)
        top = self.offset + self.step * (self.weights.size - 1)
        return LatticeDist(shift + scale * top, -scale * self.step,
                           self.weights[::-1], self.tail_mass_bound)

    def centered(self) -> "LatticeDist":
        return self.affine(-self.mean, 1.0)

    def standardized(self) -> "LatticeDist":
        sd = math.sqrt(self.variance)
        if sd == 0:
            raise DomainError("degenerate law cannot be standardized")
        return self.affine(-self.mean / sd, 1.0 / sd)

    def pmf_at(self, x: float) -> float:
        k = (x - self.offset) / self.step
        kr = round(k)
        if abs(k - kr) > 1e-9 or kr < 0 or kr >= self.weights.size:
            return 0.0
        return float(self.weights[kr])

    def __repr__(self):
        return (f"LatticeDist(offset={self.offset:g}, step={self.step:g}, "
                f"atoms={self.weights.size}, tail={self.tail_mass_bound:.2e})")


# construction

def point_mass(x: float = 0.0) -> LatticeDist:
    return LatticeDist(x, 1.0, [1.0])


def symmetric_pm1() -> LatticeDist:
    return LatticeDist(-1.0, 2.0, [0.5, 0.5])


def bernoulli(p: float) -> LatticeDist:
    _check_prob(p)
    return LatticeDist(0.0, 1.0, [1.0 - p, p])


def binomial(n: int, p: float) -> LatticeDist:
    _check_prob(p)
    if n < 1:
        raise DomainError("n must be a positive integer")
    return LatticeDist(0.0, 1.0, stats.binom.pmf(np.arange(n + 1), n, p))


def poisson_binomial(ps: Sequence[float]) -> LatticeDist:
    if len(ps) == 0:
        raise DomainError("empty probability vector")
    return reduce(convolve, (bernoulli(p) for p in ps))


def two_point_standardized(p: float) -> LatticeDist:
    """-sqrt(p/q) with probability q, sqrt(q/p) with probability p."""
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    q = 1.0 - p
    return LatticeDist(-math.sqrt(p / q), 1.0 / math.sqrt(p * q), [q, p])


def _truncated(frozen, eps: float, start: int = 0) -> LatticeDist:
    if not 0 < eps < 1:
        raise DomainError("tail epsilon must lie in (0, 1)")
    kmax = max(int(frozen.isf(eps)), start)
    while frozen.sf(kmax) >= eps:
        kmax += 1
    k = np.arange(start, kmax + 1)
    w = frozen.pmf(k)
    tail = max(float(frozen.sf(kmax)), 1.0 - float(w.sum()), 0.0)
    return LatticeDist(float(start), 1.0, w, tail)


def poisson(lam: float, eps: float = TAIL_EPSILON) -> LatticeDist:
    if lam <= 0:
        raise DomainError("Poisson parameter must be positive")
    return _truncated(stats.poisson(lam), eps)


def negative_binomial(r: float, p: float, eps: float = TAIL_EPSILON) -> LatticeDist:
    """P(k) = Gamma(r+k)/(k! Gamma(r)) p^r q^k, k >= 0."""
    if r <= 0:
        raise DomainError("r must be positive")
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    return _truncated(stats.nbinom(r, p), eps)


def geometric(p: float, eps: float = TAIL_EPSILON) -> LatticeDist:
    """P(k) = p q^k, k >= 0."""
    return negative_binomial(1.0, p, eps)


def logarithmic(q: float, eps: float = TAIL_EPSILON) -> LatticeDist:
    """Log-series law P(k) = q^k / (k ln(1/(1-q))), k >= 1."""
    if not 0.0 < q < 1.0:
        raise DomainError("q must lie in (0, 1)")
    return _truncated(stats.logser(q), eps, start=1)


def _check_prob(p):
    if not 0.0 < p <= 1.0:
        raise DomainError("p must lie in (0, 1]")


_FAMILIES = {
    "symmetric_pm1": (symmetric_pm1, ()),
    "point_mass": (point_mass, ("x",)),
    "bernoulli": (bernoulli, ("p",)),
    "binomial": (binomial, ("n", "p")),
    "poisson_binomial": (poisson_binomial, ("p",)),
    "poisson": (poisson, ("lam",)),
    "negative_binomial": (negative_binomial, ("r", "p")),
    "geometric": (geometric, ("p",)),
    "logarithmic": (logarithmic, ("q",)),
    "two_point_standardized": (two_point_standardized, ("p",)),
}
_TRUNCATED = {"poisson", "negative_binomial", "geometric", "logarithmic"}
_ALIASES = {"lambda": "lam"}


def from_spec(spec) -> LatticeDist:
    """Build a law from a descriptor: {"family": name, "params": {...},
    "tail_epsilon": eps} or {"offset": a, "step": h, "weights": [...]}."""
    if isinstance(spec, LatticeDist):
        return spec
    if isinstance(spec, str):
        spec = {"family": spec}
    if "weights" in spec:
        return LatticeDist(float(spec.get("offset", 0.0)), float(spec.get("step", 1.0)),
                           spec["weights"], float(spec.get("tail_mass_bound", 0.0)))
    name = spec.get("family")
    if name not in _FAMILIES:
        raise DomainError(f"unknown family {name!r}")
    fn, names = _FAMILIES[name]
    params = {_ALIASES.get(k, k): v for k, v in dict(spec.get("params", {})).items()}
    missing = [k for k in names if k not in params]
    extra = [k for k in params if k not in names]
    if missing or extra:
        raise DomainError(f"family {name!r} expects params {names}, got {sorted(params)}")
    args = [params[k] for k in names]
    if name in _TRUNCATED:
        args.append(float(spec.get("tail_epsilon", TAIL_EPSILON)))
    return fn(*args)


# moments

def moment(d: LatticeDist, r: float, mode: str = "absolute", with_error: bool = False):
    """Raw, absolute or central absolute moment of order r.

    The error bar for truncated laws is tail * (max|x| + step)**r, a heuristic
    that assumes the missing mass sits just beyond the stored support."""
    if r < 0:
        raise DomainError("moment order must be nonnegative")
    x, w = d.support, d.weights
    if mode == "raw":
        if r != int(r):
            raise DomainError("raw moments need an integer order")
        val = float(w @ x ** int(r))
    elif mode == "absolute":
        val = float(w @ np.abs(x) ** r)
    elif mode == "central_absolute":
        x = x - d.mean
        val = float(w @ np.abs(x) ** r)
    else:
        raise DomainError(f"unknown moment mode {mode!r}")
    if not with_error:
        return val
    err = d.tail_mass_bound * (np.abs(x).max() + d.step) ** r
    return val, float(err)


# lattice alignment

def _gcd(a: float, b: float) -> float:
    """Largest g with a/g and b/g integers (a, b >= 0) up to a small denominator."""
    a, b = abs(a), abs(b)
    if a <= 1e-15 * max(b, 1.0):
        return b
    if b <= 1e-15 * max(a, 1.0):
        return a
    ratio = a / b
    frac = Fraction(ratio).limit_denominator(_MAX_DENOMINATOR)
    if frac == 0 or abs(float(frac) - ratio) > COMMENSURABILITY_RTOL * ratio:
        raise StructuralError(f"incommensurable lattice spacings {a!r} and {b!r}")
    return b / frac.denominator


def _common_grid(dists: Sequence[LatticeDist]):
    origin = min(d.offset for d in dists)
    g = reduce(_gcd, [d.step for d in dists] + [d.offset - origin for d in dists])
    starts, strides = [], []
    end = 0
    for d in dists:
        s = (d.offset - origin) / g
        k = (d.step) / g
        if abs(s - round(s)) > 1e-6 or abs(k - round(k)) > 1e-6:
            raise StructuralError("lattices do not align on a common grid")
        starts.append(int(round(s)))
        strides.append(int(round(k)))
        end = max(end, starts[-1] + strides[-1] * (d.weights.size - 1) + 1)
    if end > _MAX_GRID:
        raise StructuralError("common grid too large")
    return origin, g, end, starts, strides


def _embed(d: LatticeDist, size: int, start: int, stride: int) -> np.ndarray:
    out = np.zeros(size)
    out[start:start + stride * d.weights.size:stride] = d.weights
    return out


def aligned(*dists: LatticeDist):
    """Common grid (origin, step) and weight arrays of the laws on it."""
    origin, g, size, starts, strides = _common_grid(dists)
    return origin, g, [_embed(d, size, s, k) for d, s, k in zip(dists, starts, strides)]


# convolution and compounding

def convolve(d1: LatticeDist, d2: LatticeDist) -> LatticeDist:
    g = _gcd(d1.step, d2.step)
    k1, k2 = int(round(d1.step / g)), int(round(d2.step / g))
    w1 = _embed(d1, k1 * (d1.weights.size - 1) + 1, 0, k1)
    w2 = _embed(d2, k2 * (d2.weights.size - 1) + 1, 0, k2)
    w = np.convolve(w1, w2)
    t1, t2 = d1.tail_mass_bound, d2.tail_mass_bound
    return LatticeDist(d1.offset + d2.offset, g, np.clip(w, 0.0, None), t1 + t2 - t1 * t2)


def self_convolve(d: LatticeDist, n: int) -> LatticeDist:
    if n < 1:
        raise DomainError("n must be a positive integer")
    result, base = None, d
    while n:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if n:
            base = convolve(base, base)
    return result


def _check_nonneg_integer(d: LatticeDist, what: str):
    if d.offset < 0 or abs(d.offset - round(d.offset)) > 1e-9 \
            or abs(d.step - round(d.step)) > 1e-9:
        raise DomainError(f"{what} must be supported on nonnegative integers")


def _integer_weights(d: LatticeDist) -> np.ndarray:
    _check_nonneg_integer(d, "law")
    o, h = int(round(d.offset)), int(round(d.step))
    return _embed(d, o + h * (d.weights.size - 1) + 1, o, h)


def compound(index: LatticeDist, summand: LatticeDist) -> LatticeDist:
    """Law of X_1 + ... + X_N with N ~ index independent of iid X_k ~ summand."""
    _check_nonneg_integer(index, "index")
    pn = _integer_weights(index)
    nmax = pn.size - 1
    o, h = summand.offset, summand.step
    g = _gcd(h, o)
    stride = int(round(h / g))
    lo = min(0.0, nmax * o)
    size = int(round((max(0.0, nmax * o) - lo) / g)) + stride * nmax * (summand.weights.size - 1) + 1
    if size > _MAX_GRID:
        raise StructuralError("compound support too large")
    acc = np.zeros(size)
    tail = index.tail_mass_bound
    cur = LatticeDist(0.0, h, [1.0])
    for n in range(nmax + 1):
        if n:
            cur = convolve(cur, summand)
        if pn[n] == 0.0:
            continue
        start = int(round((cur.offset - lo) / g))
        k = int(round(cur.step / g))
        acc[start:start + k * cur.weights.size:k] += pn[n] * cur.weights
        tail += pn[n] * cur.tail_mass_bound
    total = acc.sum()
    tail = max(tail, 1.0 - total, 0.0)
    if total + tail > 1.0 + 1e-13:
        tail = max(1.0 - total, 0.0)
    return LatticeDist(lo, g, acc, tail)


# exact distances

def _normal_cdf(x, mean, sd):
    return Phi((x - mean) / sd)


def kolmogorov_distance(d: LatticeDist, reference=None, mean: float = 0.0, sd: float = 1.0,
                        with_error: bool = False):
    """sup_x |P(X < x) - G(x)| against N(mean, sd^2) or another lattice law.

    Against a continuous G the supremum sits at an atom: between atoms F is
    constant and G monotone, so only the one-sided limits at atoms matter."""
    if reference is None:
        if sd <= 0:
            raise DomainError("sd must be positive")
        x, w = d.atoms()
        after = np.cumsum(w)
        before = after - w
        G = _normal_cdf(x, mean, sd)
        val = float(max(np.abs(before - G).max(), np.abs(after - G).max()))
        err = d.tail_mass_bound
    else:
        _, _, (w1, w2) = aligned(d, reference)
        val = float(np.abs(np.cumsum(w1) - np.cumsum(w2)).max())
        err = d.tail_mass_bound + reference.tail_mass_bound
    return (val, err) if with_error else val


def point_distance(d: LatticeDist, x: float, mean: float = 0.0, sd: float = 1.0) -> float:
    """max(|P(X < x) - G(x)|, |P(X <= x) - G(x)|) for G = N(mean, sd^2)."""
    xs, w = d.atoms()
    before = float(w[xs < x].sum())
    upto = float(w[xs <= x].sum())
    G = float(_normal_cdf(x, mean, sd))
    return max(abs(before - G), abs(upto - G))


def tv_distance(d1: LatticeDist, d2: LatticeDist, with_error: bool = False):
    _, _, (w1, w2) = aligned(d1, d2)
    val = 0.5 * float(np.abs(w1 - w2).sum())
    err = 0.5 * (d1.tail_mass_bound + d2.tail_mass_bound)
    return (val, err) if with_error else val


def _int_phi_minus_c(a, b, c):
    """Integral of Phi(x) - c over (a, b), written to avoid cancellation."""
    if c >= 0.5:
        return (1.0 - c) * (b - a) - (Phi_tail_integral(a) - Phi_tail_integral(b))
    return (Phi_integral(b) - Phi_integral(a)) - c * (b - a)


def zeta1_distance(d: LatticeDist, mean: float = 0.0, sd: float = 1.0) -> float:
    """Integral of |F(x) - Phi((x-mean)/sd)| dx by exact piecewise integration."""
    if sd <= 0:
        raise DomainError("sd must be positive")
    x, w = d.atoms()
    y = (x - mean) / sd
    c = np.cumsum(w)
    c[-1] = 1.0  # truncated mass is taken to sit beyond the last atom
    total = float(Phi_integral(y[0])) + float(Phi_tail_integral(y[-1]))
    for a, b, ck in zip(y[:-1], y[1:], c[:-1]):
        if ck <= 0.0:
            r = a
        elif ck >= 1.0:
            r = b
        else:
            r = min(max(Phi_inv(ck), a), b)
        total += -_int_phi_minus_c(a, r, ck) + _int_phi_minus_c(r, b, ck)
    return sd * total


class LindebergFractions(NamedTuple):
    L_n_eps: float
    M_n_eps: float
    B_n: float


def lindeberg_osipov_fractions(ds: Sequence[LatticeDist], eps: float) -> LindebergFractions:
    """Lindeberg fraction L_n(eps) and Osipov fraction M_n(eps) of centered summands."""
    if eps <= 0:
        raise DomainError("eps must be positive")
    B2 = sum(float(d.weights @ d.support ** 2) for d in ds)
    if B2 <= 0:
        raise DomainError("all summands are degenerate")
    B = math.sqrt(B2)
    L = M = 0.0
    for d in ds:
        x, w = d.support, d.weights
        big = np.abs(x) > eps * B
        L += float(w[big] @ x[big] ** 2)
        M += float(w[~big] @ np.abs(x[~big]) ** 3)
    return LindebergFractions(L / B2, M / (B2 * B), B)


# infinitely divisible nonnegative-integer laws

@dataclass(frozen=True, eq=False)
class DecompositionResult:
    lambda_: float
    y_dist: LatticeDist
    gammas: np.ndarray
    is_bdnc: bool
    min_gamma: float
    notes: tuple = field(default=())


def bdnc_decompose(n_dist: LatticeDist, n_terms: int | None = None,
                   tol: float = 1e-12) -> DecompositionResult:
    """Compound-Poisson form N = {N_lambda, Y} via the log-pgf coefficients."""
    p = _integer_weights(n_dist)
    if p[0] <= 0.0:
        raise DomainError("P(N=0) must be positive: an infinitely divisible "
                          "nonnegative-integer law always has an atom at zero")
    if n_terms is None:
        n_terms = p.size - 1 + (64 if n_dist.tail_mass_bound == 0.0 else 0)
    n_terms = max(n_terms, 1)
    pk = np.zeros(n_terms + 1)
    m = min(p.size, n_terms + 1)
    pk[:m] = p[:m]
    lam = -math.log(p[0])
    if lam == 0.0:
        return DecompositionResult(0.0, point_mass(1.0), np.zeros(1), True, 0.0,
                                   ("degenerate at zero",))
    # k p_k = sum_{j=1..k} j gamma_j p_{k-j}
    gam = np.zeros(n_terms + 1)
    gam[0] = -lam
    jg = np.zeros(n_terms + 1)
    for k in range(1, n_terms + 1):
        s = float(jg[1:k] @ pk[k - 1:0:-1]) if k > 1 else 0.0
        jg[k] = (k * pk[k] - s) / pk[0]
        gam[k] = jg[k] / k
    min_gamma = float(gam[1:].min())
    is_bdnc = min_gamma >= -tol * max(1.0, lam)
    wy = np.clip(gam[1:], 0.0, None) / lam
    tail = max(0.0, 1.0 - float(wy.sum()))
    if wy.sum() > 1.0:
        wy = wy / wy.sum()
        tail = 0.0
    notes = () if is_bdnc else ("negative log-pgf coefficient: not infinitely divisible "
                                "within nonnegative-integer laws",)
    y = LatticeDist(1.0, 1.0, wy, tail) if wy.any() else point_mass(1.0)
    return DecompositionResult(lam, y, gam, is_bdnc, min_gamma, notes)
