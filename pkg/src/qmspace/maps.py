"""Distortion envelopes of finite point maps and power control functions.

A map between finite spaces is an index bijection. Its distance-ratio
(symmetric) and cross-ratio (mobius) distortion is recorded as the upper
staircase of attained (t, s) pairs, which any increasing control must
dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError, InsufficientPointsError, QuasiMetricError, QuasiMetricSpace
from .crossratio import FULL_ENUMERATION_MAX_N, ThetaGauge, cross_ratios, distinct_quadruples

SYMMETRIC = "symmetric"
MOBIUS = "mobius"
KINDS = (SYMMETRIC, MOBIUS)

# triple scans enumerate every ordered triple up to this many points
QS_ENUMERATION_MAX_N = 128
DEFAULT_ALPHA_GRID = np.geomspace(1.0, 8.0, 64)
FIT_TIE_RTOL = 1e-9


class UnfittableError(QuasiMetricError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PointMap:
    """source index i goes to target index bijection[i]."""

    source: QuasiMetricSpace
    target: QuasiMetricSpace
    bijection: np.ndarray

    def __post_init__(self):
        bij = np.asarray(self.bijection, dtype=int)
        n = self.source.n
        if self.target.n != n or bij.shape != (n,) or not np.array_equal(np.sort(bij), np.arange(n)):
            raise DomainError("bijection must be a permutation between equal-size spaces")
        bij.setflags(write=False)
        object.__setattr__(self, "bijection", bij)

    @classmethod
    def identity(cls, source: QuasiMetricSpace, target: QuasiMetricSpace) -> "PointMap":
        return cls(source, target, np.arange(source.n))

    @property
    def n(self) -> int:
        return self.source.n

    def pulled_back_target(self) -> np.ndarray:
        """Target distances indexed by source points."""
        b = self.bijection
        return self.target.rho[np.ix_(b, b)]

    def then(self, other: "PointMap") -> "PointMap":
        """The composite other after self."""
        if other.source.n != self.n:
            raise DomainError("maps are not composable")
        return PointMap(self.source, other.target, other.bijection[self.bijection])

    def to_dict(self) -> dict:
        return {"bijection": self.bijection.tolist()}


@dataclass(frozen=True)
class DistortionEnvelope:
    """Upper staircase: t and s both strictly increasing."""

    t: np.ndarray
    s: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown envelope kind {self.kind!r}")

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.s.tolist()))

    def __len__(self) -> int:
        return len(self.t)

    def value_at(self, t) -> np.ndarray:
        """Staircase height at t: the largest stored s with abscissa <= t (0 before the first)."""
        idx = np.searchsorted(self.t, np.asarray(t, dtype=float), side="right") - 1
        return np.where(idx >= 0, self.s[np.maximum(idx, 0)], 0.0)

    def dominated_by(self, control: Callable, rtol: float = 1e-12) -> bool:
        """True when control(t) >= s at every stored abscissa."""
        if not len(self):
            return True
        return bool(np.all(self.s <= np.asarray(control(self.t)) * (1 + rtol)))

    def to_csv(self) -> str:
        return "t,s\n" + "".join(f"{t:.17g},{s:.17g}\n" for t, s in self.points)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "t": self.t.tolist(), "s": self.s.tolist()}


def staircase(t, s) -> tuple[np.ndarray, np.ndarray]:
    """Pareto upper staircase of raw (t, s) pairs.

    Keeps exactly the running-maximum records of s in increasing t, so every
    raw pair lies on or below the step function through the kept points.
    """
    t = np.asarray(t, dtype=float).ravel()
    s = np.asarray(s, dtype=float).ravel()
    if not len(t):
        return t, s
    order = np.lexsort((-s, t))
    t, s = t[order], s[order]
    prev = np.concatenate(([-np.inf], np.maximum.accumulate(s)[:-1]))
    keep = s > prev
    return t[keep], s[keep]


def _merge(parts) -> tuple[np.ndarray, np.ndarray]:
    if not parts:
        return np.empty(0), np.empty(0)
    return staircase(np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts]))


def qs_envelope(fmap: PointMap, triple_budget: int = 1_000_000, seed: int = 0) -> DistortionEnvelope:
    """Staircase of (rho1(x,a)/rho1(x,b), rho2(x',a')/rho2(x',b')) over distinct triples.

    Every ordered triple when n <= 128, otherwise `triple_budget` seeded samples.
    """
    n = fmap.n
    if n < 3:
        raise InsufficientPointsError("symmetric envelopes need at least 3 points")
    r1 = fmap.source.rho
    r2 = fmap.pulled_back_target()
    parts = []
    if n <= QS_ENUMERATION_MAX_N:
        off = ~np.eye(n, dtype=bool)
        for x in range(n):
            mask = off.copy()
            mask[x, :] = False
            mask[:, x] = False
            with np.errstate(divide="ignore", invalid="ignore"):
                t = r1[x][:, None] / r1[x][None, :]
                s = r2[x][:, None] / r2[x][None, :]
            parts.append(staircase(t[mask], s[mask]))
    else:
        rng = np.random.default_rng(seed)
        x = rng.integers(0, n, triple_budget)
        a = rng.integers(0, n - 1, triple_budget)
        a = a + (a >= x)
        b = rng.integers(0, n - 2, triple_budget)
        lo, hi = np.minimum(x, a), np.maximum(x, a)
        b = b + (b >= lo)
        b = b + (b >= hi)
        parts.append(staircase(r1[x, a] / r1[x, b], r2[x, a] / r2[x, b]))
    t, s = _merge(parts)
    return DistortionEnvelope(t, s, SYMMETRIC)


def qm_envelope(fmap: PointMap, quad_budget: int = 200_000, seed: int = 0) -> DistortionEnvelope:
    """Staircase of (r1(a,b,c,d), r2(a',b',c',d')) over distinct quadruples.

    Every ordered quadruple when n <= 40, otherwise `quad_budget` seeded samples.
    """
    n = fmap.n
    if n < 4:
        raise InsufficientPointsError("mobius envelopes need at least 4 points")
    a, b, c, d, _ = distinct_quadruples(n, quad_budget, seed, FULL_ENUMERATION_MAX_N)
    r2 = fmap.pulled_back_target()
    t, s = staircase(cross_ratios(fmap.source.rho, a, b, c, d), cross_ratios(r2, a, b, c, d))
    return DistortionEnvelope(t, s, MOBIUS)


@dataclass(frozen=True)
class PowerControl:
    """t -> m * max(t^(1/alpha), t^alpha)."""

    m: float
    alpha: float
    kind: str = SYMMETRIC

    def __post_init__(self):
        if not (self.m >= 1 and self.alpha >= 1) or not (math.isfinite(self.m) and math.isfinite(self.alpha)):
            raise DomainError(f"power control needs finite m >= 1 and alpha >= 1, got ({self.m}, {self.alpha})")
        if self.kind not in KINDS:
            raise DomainError(f"unknown control kind {self.kind!r}")

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0):
            raise DomainError("control argument must be non-negative")
        out = self.m * np.maximum(arr ** (1.0 / self.alpha), arr ** self.alpha)
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"kind": self.kind, "M": self.m, "alpha": self.alpha}

    @classmethod
    def from_dict(cls, d: dict) -> "PowerControl":
        try:
            return cls(float(d["M"]), float(d["alpha"]), d.get("kind", SYMMETRIC))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"bad control description: {exc}") from None


def _required_m(t: np.ndarray, s: np.ndarray, alpha: float) -> float:
    base = np.maximum(t ** (1.0 / alpha), t ** alpha)
    return max(1.0, float((s / base).max()))


def fit_power_control(env: DistortionEnvelope, alpha_grid=None) -> PowerControl:
    """Smallest-M power control over a grid of exponents; ties go to the smaller exponent.

    For a fixed alpha the least admissible M is max(1, max s / base(t)); the
    winner dominates every envelope point.
    """
    if not len(env):
        raise DomainError("cannot fit an empty envelope")
    grid = np.sort(np.asarray(DEFAULT_ALPHA_GRID if alpha_grid is None else alpha_grid, dtype=float))
    if not len(grid) or np.any(grid < 1):
        raise DomainError("alpha grid must be non-empty with entries >= 1")
    t, s = env.t, env.s
    zero = t == 0
    if np.any(zero & (s > 0)):
        raise UnfittableError("envelope attains s > 0 at t = 0; no power control fits")
    t, s = t[~zero], s[~zero]
    if not len(t):
        return PowerControl(1.0, float(grid[0]), env.kind)
    ms = np.array([_required_m(t, s, a) for a in grid])
    best = ms.min()
    i = int(np.flatnonzero(ms <= best * (1 + FIT_TIE_RTOL))[0])
    return PowerControl(float(ms[i]), float(grid[i]), env.kind)


def _check_k(k: float):
    if not k > 1:
        raise DomainError(f"gauge coefficient must exceed 1, got {k}")


def qs_to_qm_control(eta: PowerControl, k: float) -> PowerControl:
    """Power mobius control (M^2 K^(4(1+alpha)), 2 alpha) implied by a power symmetric control."""
    _check_k(k)
    return PowerControl(eta.m ** 2 * k ** (4 * (1 + eta.alpha)), 2 * eta.alpha, MOBIUS)


def qs_to_qm_evaluator(eta: Callable, k: float) -> Callable:
    """General mobius control t -> 1 / g^-1(1 / eta(g(t))) with g the K-gauge."""
    _check_k(k)
    g = ThetaGauge(k)

    def theta(t):
        return 1.0 / g.inverse(1.0 / np.asarray(eta(g(t)), dtype=float))

    return theta


def qm_to_qs_control(theta: PowerControl, k: float, lam: float) -> PowerControl:
    """Power symmetric control (K^(3+6 beta) M (2 lam)^(1+2 beta), 2 beta) under a lam-three-point condition."""
    _check_k(k)
    if lam < 1:
        raise DomainError(f"three-point constant must be >= 1, got {lam}")
    b = theta.alpha
    return PowerControl(k ** (3 + 6 * b) * theta.m * (2 * lam) ** (1 + 2 * b), 2 * b, SYMMETRIC)


QM_QM = "qm∘qm"
QS_QM = "qs∘qm"


def compose_controls(first: PowerControl, second: PowerControl, mode: str = QM_QM,
                     k: float | None = None) -> PowerControl:
    """Power mobius control dominating the control of (second after first).

    qm∘qm: both mobius, result (M2 max(M1,1)^b2, b1 b2).
    qs∘qm: first mobius, second symmetric; the symmetric one is converted
    with qs_to_qm_control at gauge k and then composed as above.
    """
    if mode == QM_QM:
        return PowerControl(second.m * max(first.m, 1.0) ** second.alpha, first.alpha * second.alpha, MOBIUS)
    if mode == QS_QM:
        if k is None:
            raise DomainError("qs∘qm composition needs a gauge coefficient")
        return compose_controls(first, qs_to_qm_control(second, k), QM_QM)
    raise DomainError(f"unknown composition mode {mode!r}")


def composition_evaluator(first: Callable, second: Callable, mode: str = QM_QM,
                          k: float | None = None) -> Callable:
    """Exact composed control: second(first(t)), or the gauge sandwich for qs∘qm."""
    if mode == QM_QM:
        return lambda t: second(first(t))
    if mode == QS_QM:
        if k is None:
            raise DomainError("qs∘qm composition needs a gauge coefficient")
        outer = qs_to_qm_evaluator(second, k)
        return lambda t: outer(first(t))
    raise DomainError(f"unknown composition mode {mode!r}")


@dataclass
class ThreePointReport:
    lambda_hat: float
    triple: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {"lambda_hat": self.lambda_hat, "triple": list(self.triple)}


def _triple_min_distance(rho: np.ndarray, i: int) -> np.ndarray:
    """m[j, k] = min pairwise distance of {i, j, k}."""
    return np.minimum(np.minimum(rho[i][:, None], rho[i][None, :]), rho)


def three_point_lambda(fmap: PointMap) -> ThreePointReport:
    """Smallest lam such that some triple is diam/lam-spread in both source and target.

    Exact scan over all triples; ties go to the lexicographically first i < j < k.
    """
    n = fmap.n
    if n < 3:
        raise InsufficientPointsError("the three-point condition needs at least 3 points")
    r1, r2 = fmap.source.rho, fmap.pulled_back_target()
    d1, d2 = r1.max(), r2.max()
    jj, kk = np.triu_indices(n, 1)
    best, triple = math.inf, None
    for i in range(n - 2):
        sel = jj > i
        j, k = jj[sel], kk[sel]
        lam = np.maximum(d1 / _triple_min_distance(r1, i)[j, k], d2 / _triple_min_distance(r2, i)[j, k])
        p = int(np.argmin(lam))
        if lam[p] < best:
            best, triple = float(lam[p]), (i, int(j[p]), int(k[p]))
    return ThreePointReport(best, triple)
