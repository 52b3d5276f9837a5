"""Normal approximation bounds for random sums: Poisson-binomial, Poisson,
mixed Poisson and compound-Poisson (infinitely divisible) indices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy import optimize as spo

from . import tables
from .bounds_clt import BoundResult
from .errors import DomainError, TableLookupError
from .special import Phi, bessel_i0, wendel_bounds

PINELIS_A = 0.25 * math.sqrt((7 + 5 * math.sqrt(2)) / (math.pi * math.exp(1 + math.sqrt(2))))
A_R_CAP = 0.8593
A_R_SWITCH = 1.59
GAMMA_SEARCH = (1e-4, 20.0)
GAMMA_XTOL = 1e-10
RATE_SERIES_TOL = 1e-14
RATE_SERIES_WINDOW = 64
RATE_SERIES_MAX_TERMS = 200_000

# constants of the delta = 1 corollaries for centered summands
_PB_DELTA1 = {"general": ((0.0, 0.5583), (1.0, 0.3057)), "iid": ((0.0, 0.469), (0.646, 0.3031))}


@dataclass(frozen=True)
class SummandMoments:
    """a = EX, beta2 = EX^2, beta = E|X|^(2+delta), central = E|X-a|^(2+delta) if known."""

    a: float
    beta2: float
    beta: float
    delta: float = 1.0
    central: float | None = None

    def __post_init__(self):
        if not 0 < self.delta <= 1:
            raise DomainError("delta must lie in (0, 1]")
        if self.beta2 <= 0:
            raise DomainError("beta2 must be positive")
        if self.a * self.a > self.beta2 * (1 + 1e-12):
            raise DomainError("a^2 cannot exceed beta2")
        if self.beta < self.beta2 ** (1 + self.delta / 2) * (1 - 1e-12):
            raise DomainError("moments violate the Lyapunov inequality")

    @property
    def sigma2(self) -> float:
        return self.beta2 - self.a * self.a

    @property
    def ratio(self) -> float:
        return self.beta / self.beta2 ** (1 + self.delta / 2)


@dataclass(frozen=True)
class PBParams:
    lam: float
    lam2: float
    equal: bool

    @classmethod
    def from_p(cls, p: Sequence[float]) -> "PBParams":
        p = np.asarray(p, dtype=float)
        if p.size == 0:
            raise DomainError("empty probability vector")
        if np.any((p <= 0) | (p > 1)):
            raise DomainError("probabilities must lie in (0, 1]")
        eq = bool(np.ptp(p) <= 1e-12 * p.max())
        return cls(float(p.sum()), float(p @ p), eq)

    @classmethod
    def from_summary(cls, lam: float, theta: float, equal: bool = False) -> "PBParams":
        if lam <= 0 or not 0 < theta <= 1:
            raise DomainError("need lambda > 0 and theta in (0, 1]")
        return cls(lam, theta * lam, equal)

    @property
    def theta(self) -> float:
        return self.lam2 / self.lam


@dataclass(frozen=True)
class IndexMoments:
    """Moments of the positive integer summand Y of a compound-Poisson index;
    EY_half = E Y^(1+delta/2), EY_full = E Y^(2+delta)."""

    EY: float
    EY2: float | None = None
    EY_half: float | None = None
    EY_full: float | None = None

    def __post_init__(self):
        if self.EY <= 0:
            raise DomainError("EY must be positive")
        for v in (self.EY2, self.EY_half, self.EY_full):
            if v is not None and v < 0:
                raise DomainError("moments must be nonnegative")


def poisson_coupling_tv(p: Sequence[float]) -> float:
    """Coupling bound sum p_k^2 on d_TV(PB(p), Pois(sum p))."""
    p = np.asarray(p, dtype=float)
    if p.size == 0:
        raise DomainError("empty probability vector")
    if np.any((p <= 0) | (p > 1)):
        raise DomainError("probabilities must lie in (0, 1]")
    return float(p @ p)


def pb_sum_bound(pb: PBParams, m: SummandMoments, s_list=None) -> BoundResult:
    """Uniform bound for a standardized Poisson-binomial random sum."""
    d = m.delta
    regime = "iid" if pb.equal else "general"
    th = pb.theta
    r = m.ratio
    if m.a == 0 and d == 1.0 and s_list is None:
        # at delta = 1 the closed form keeps s outside the constant
        (_, c0), (s1, c1) = _PB_DELTA1[regime]
        cands = [(c0 * r, c0, 0.0), (c1 * r + s1 * math.sqrt(th), c1, s1)]
        value, c, s = min(cands)
        return BoundResult(value / math.sqrt(pb.lam), (f"C_{s:g}", c), f"pb_sum centered {regime}",
                           ("EX = 0",))
    pairs = tables.structured_constants(d, regime)
    if s_list is not None:
        keep = []
        for s in s_list:
            hit = [pc for pc in pairs if abs(pc[0] - s) < 1e-9]
            if not hit:
                raise TableLookupError(f"s={s} is not tabulated at delta={d}")
            keep.append(hit[0])
        pairs = keep
    if m.a == 0:
        cands = [(c * (r + s * th ** (d / 2)) / pb.lam ** (d / 2), s, c) for s, c in pairs]
        tag, assume = "pb_sum centered", ("EX = 0",)
    else:
        if th >= 1:
            raise DomainError("theta < 1 is required when EX != 0")
        pre = pb.lam ** (d / 2) * (1 - th) ** (d / 2)
        core = r * (1 + 3.25 * th ** d) / (1 - th)
        cands = [(c * (core + s * th ** (d / 2)) / pre, s, c) for s, c in pairs]
        tag, assume = "pb_sum general", ("theta < 1",)
    value, s, c = min(cands)
    return BoundResult(value, (f"C_{s:g}", c), f"{tag} {regime}", assume)


def _poisson_form(M: float, lam: float, num: float, var: float, delta: float) -> float:
    return M * num / (lam ** (delta / 2) * var ** (1 + delta / 2))


def poisson_sum_bound(lam: float, m: SummandMoments) -> BoundResult:
    if lam <= 0:
        raise DomainError("lambda must be positive")
    M = tables.M(m.delta)
    value = _poisson_form(M, lam, m.beta, m.beta2, m.delta)
    notes = ("M(1) = 0.3031 lies below 1/sqrt(2 pi)",) if m.delta == 1.0 else ()
    return BoundResult(value, (f"M({m.delta:g})", M), "poisson_sum", notes)


class LowerValue(NamedTuple):
    value: float
    gamma_star: float


def _poisson_lower(delta, g):
    return 0.5 * g ** (delta / 2) * math.exp(-g) * bessel_i0(g)


def poisson_sum_lower(delta: float, gamma: float | None = None) -> LowerValue:
    """Minorant 1/2 gamma^(delta/2) e^(-gamma) I0(gamma) of M(delta), at gamma or maximized."""
    if not 0 < delta <= 1:
        raise DomainError("delta must lie in (0, 1]")
    if gamma is not None:
        if gamma <= 0:
            raise DomainError("gamma must be positive")
        return LowerValue(_poisson_lower(delta, gamma), gamma)
    r = spo.minimize_scalar(lambda g: -_poisson_lower(delta, g), bounds=GAMMA_SEARCH,
                            method="bounded", options={"xatol": GAMMA_XTOL})
    return LowerValue(float(-r.fun), float(r.x))


def mixed_poisson_bound(m: SummandMoments, E_lambda_inv_pow: float, delta_t: float = 0.0) -> BoundResult:
    """M(delta) beta E Lambda^(-delta/2) + delta_t for a standardized summand."""
    _check_standard(m)
    if E_lambda_inv_pow < 0 or delta_t < 0:
        raise DomainError("inputs must be nonnegative")
    M = tables.M(m.delta)
    return BoundResult(M * m.beta * E_lambda_inv_pow + delta_t, (f"M({m.delta:g})", M), "mixed_poisson",
                       ("EX = 0, EX^2 = 1",))


class InvGammaMoment(NamedTuple):
    exact: float
    upper: float


def inverse_gamma_moment(r: float, t: float, delta: float) -> InvGammaMoment:
    """E Lambda_t^(-delta/2) for 1/Lambda_t ~ Gamma(shape r/2, rate t/2), and the
    gamma-ratio upper bound (r/t)^(delta/2)."""
    if r <= 0 or t <= 0:
        raise DomainError("r and t must be positive")
    scale = (2 / t) ** (delta / 2)
    exact = scale * math.exp(math.lgamma((r + delta) / 2) - math.lgamma(r / 2))
    upper = scale * (r / 2) ** (delta / 2) * wendel_bounds(r / 2, delta / 2).upper
    return InvGammaMoment(exact, upper)


def _check_standard(m: SummandMoments):
    if m.a != 0 or abs(m.beta2 - 1) > 1e-12:
        raise DomainError("this bound needs EX = 0 and EX^2 = 1")


def student_limit_bounds(r: float, t: float, m: SummandMoments, mode: str = "student") -> BoundResult:
    _check_standard(m)
    if r <= 0 or t <= 0:
        raise DomainError("r and t must be positive")
    d = m.delta
    M = tables.M(d)
    if mode == "optimal_r":
        val = (M * m.beta + PINELIS_A) * t ** (-d / (2 + d))
        return BoundResult(val, ("A", PINELIS_A), "optimal_r", ("r = t^(delta/(2+delta))",))
    mom = inverse_gamma_moment(r, t, d)
    student = M * m.beta * mom.exact
    relaxed = M * m.beta * mom.upper
    if mode == "student":
        return BoundResult(student, (f"M({d:g})", M), "student",
                           (f"relaxed form {relaxed:.6g}",))
    if mode == "normal":
        return BoundResult(student + PINELIS_A / r, ("A", PINELIS_A), "normal",
                           (f"M({d:g}) = {M:g}",))
    raise DomainError(f"unknown mode {mode!r}")


def A_r(r: float) -> float:
    if r <= 0:
        raise DomainError("r must be positive")
    if r <= A_R_SWITCH:
        return A_R_CAP
    return min(A_R_CAP, 1 / (math.pi * (r - 1)))


def nb_limit_bounds(r: float, p: float, m: SummandMoments, mode: str = "sym_gamma") -> BoundResult:
    _check_standard(m)
    if not 0 < p < 1:
        raise DomainError("p must lie in (0, 1)")
    d = m.delta
    M = tables.M(d)
    odds = (p / (1 - p)) ** (d / 2)
    if mode == "laplace":
        r = 1.0
    if r <= d / 2:
        raise DomainError("r must exceed delta/2")
    ratio = math.exp(math.lgamma(r - d / 2) - math.lgamma(r))
    value = M * m.beta * ratio * odds
    relaxed = M * m.beta * (1 + d / (2 * r - d)) * (p / r) ** (d / 2) / (1 - p) ** (d / 2)
    if mode in ("sym_gamma", "laplace"):
        return BoundResult(value, (f"M({d:g})", M), mode, (f"relaxed form {relaxed:.6g}",))
    if mode == "normal":
        Ar = A_r(r)
        return BoundResult(value + Ar / r, ("A_r", Ar), "normal", (f"M({d:g}) = {M:g}",))
    raise DomainError(f"unknown mode {mode!r}")


def bdnc_sum_bound(lam: float, y: IndexMoments, m: SummandMoments, mode: str = "general") -> BoundResult:
    """Uniform bound for a random sum whose index is compound Poisson {N_lambda, Y}."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    d = m.delta
    M = tables.M(d)
    if mode == "general":
        if y.EY_full is None or y.EY2 is None:
            raise DomainError("general mode needs E Y^2 and E Y^(2+delta)")
        var = m.beta2 * y.EY + m.a * m.a * (y.EY2 - y.EY)
        return BoundResult(_poisson_form(M, lam, m.beta * y.EY_full, var, d), (f"M({d:g})", M), "general")
    if mode == "centered":
        if m.a != 0:
            raise DomainError("centered mode needs EX = 0")
        if y.EY_half is None:
            raise DomainError("centered mode needs E Y^(1+delta/2)")
        K = (1 + d) * (4 + d) / 2
        val = K * M / lam ** (d / 2) * m.ratio * y.EY_half / y.EY ** (1 + d / 2)
        return BoundResult(val, ("K M", K * M), "centered", ("EX = 0",))
    if mode == "combined":
        if y.EY_half is None or y.EY_full is None or y.EY2 is None:
            raise DomainError("combined mode needs E Y^2, E Y^(1+delta/2) and E Y^(2+delta)")
        notes = ()
        central = m.central
        if central is None:
            central = m.beta + 3.25 * m.beta2 * abs(m.a) ** d
            notes = ("central moment replaced by beta + 3.25 beta2 |a|^delta",)
        var = m.sigma2 * y.EY + m.a * m.a * y.EY2
        num = (1 + d) * (4 + d) * central * y.EY_half + 2 * abs(m.a) ** (2 + d) * y.EY_full
        val = 2 ** d * M * num / (lam ** (d / 2) * var ** (1 + d / 2))
        return BoundResult(val, (f"M({d:g})", M), "combined", notes)
    raise DomainError(f"unknown mode {mode!r}")


class NBIndexMoments(NamedTuple):
    lam: float
    EY: float
    EY_half_upper: float
    ratio_upper: float


def nb_index_moments(r: float, p: float, delta: float = 1.0) -> NBIndexMoments:
    """Compound-Poisson parameters of NB(r, p) with logarithmic Y."""
    if r <= 0 or not 0 < p < 1:
        raise DomainError("need r > 0 and p in (0, 1)")
    q = 1 - p
    L = math.log(1 / p)
    lam = r * L
    EY = q / (p * L)
    return NBIndexMoments(lam, EY, q / (p ** (1 + delta / 2) * L), (lam / (r * q)) ** (delta / 2))


class InsuranceEstimate(NamedTuple):
    estimate: float
    error_bound: float
    ceiling: float
    mean: float
    variance: float
    EY: float
    EY2: float
    EY3: float


def _rate_moments(rates):
    """Total rate and first three moments of Y with P(Y=k) proportional to rates[k]."""
    if callable(rates):
        sums = np.zeros(4)
        history = []
        k = 0
        while True:
            k += 1
            lk = float(rates(k))
            if lk < 0:
                raise DomainError("rates must be nonnegative")
            sums += lk * np.array([1.0, k, k * k, k ** 3])
            history.append(sums.copy())
            if k > RATE_SERIES_WINDOW:
                old = history[-RATE_SERIES_WINDOW - 1]
                if np.all(np.abs(sums - old) <= RATE_SERIES_TOL * np.maximum(1.0, np.abs(sums))):
                    break
                history.pop(0)
            if k >= RATE_SERIES_MAX_TERMS:
                raise DomainError("rate series does not converge")
    else:
        lk = np.asarray(rates, dtype=float)
        if lk.size == 0 or np.any(lk < 0):
            raise DomainError("rates must be a nonempty nonnegative sequence")
        k = np.arange(1, lk.size + 1, dtype=float)
        sums = np.array([lk.sum(), lk @ k, lk @ k ** 2, lk @ k ** 3])
    if sums[0] <= 0:
        raise DomainError("total rate must be positive")
    return sums[0], sums[1] / sums[0], sums[2] / sums[0], sums[3] / sums[0]


def insurance_tail_estimate(t: float, a: float, sigma2: float, beta3: float,
                            rates: Callable | Sequence[float], threshold: float) -> InsuranceEstimate:
    """P(S_N > threshold) for claims summed over a multiple-Poisson count,
    by the normal approximation with its uniform error bound."""
    total, EY, EY2, EY3 = (float(v) for v in _rate_moments(rates))
    lam = t * total
    mean = a * lam * EY
    var = sigma2 * lam * EY + a * a * lam * EY2
    est = float(Phi(-(threshold - mean) / math.sqrt(var)))
    m = SummandMoments(a, sigma2 + a * a, beta3, 1.0)
    err = bdnc_sum_bound(lam, IndexMoments(EY, EY2=EY2, EY_full=EY3), m, "general").value
    return InsuranceEstimate(est, float(err), float(est + err), mean, var, EY, EY2, EY3)
