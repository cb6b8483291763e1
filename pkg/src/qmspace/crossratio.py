"""Cross ratios, the min-based bracket and the gauge comparing them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RTOL, DomainError, InsufficientPointsError, QuasiMetricError, QuasiMetricSpace

# spaces up to this size are scanned over every ordered quadruple
FULL_ENUMERATION_MAX_N = 40


class DegenerateQuadrupleError(QuasiMetricError, ValueError):
    pass


def _rho(space) -> np.ndarray:
    return space.rho if isinstance(space, QuasiMetricSpace) else np.asarray(space, dtype=float)


def cross_ratio(space, a: int, b: int, c: int, d: int) -> float:
    """rho(a,c) rho(b,d) / (rho(a,b) rho(c,d))."""
    if a == b or c == d:
        raise DegenerateQuadrupleError(f"cross ratio undefined for ({a}, {b}, {c}, {d})")
    rho = _rho(space)
    return float((rho[a, c] / rho[a, b]) * (rho[b, d] / rho[c, d]))


def bk_bracket(space, a: int, b: int, c: int, d: int) -> float:
    if a == b or c == d:
        raise DegenerateQuadrupleError(f"bracket undefined for ({a}, {b}, {c}, {d})")
    rho = _rho(space)
    return float(min(rho[a, c], rho[b, d]) / min(rho[a, b], rho[c, d]))


def cross_ratios(rho: np.ndarray, a, b, c, d) -> np.ndarray:
    """Vectorised cross ratio over index arrays; no degeneracy checks."""
    # the quotient-of-quotients order avoids underflow on deep geometric samples
    return (rho[a, c] / rho[a, b]) * (rho[b, d] / rho[c, d])


def brackets(rho: np.ndarray, a, b, c, d) -> np.ndarray:
    return np.minimum(rho[a, c], rho[b, d]) / np.minimum(rho[a, b], rho[c, d])


@dataclass(frozen=True)
class ThetaGauge:
    """t -> K^2 max(t, sqrt t): K^2 sqrt(t) on [0, 1], K^2 t beyond."""

    k: float

    def __post_init__(self):
        if not self.k >= 1:
            raise DomainError(f"gauge coefficient must be >= 1, got {self.k}")

    def __call__(self, t):
        return theta_k(self, t)

    def inverse(self, u):
        return theta_k_inverse(self, u)


def _check_nonneg(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("gauge argument must be non-negative")
    return arr


def theta_k(gauge: ThetaGauge, t):
    arr = _check_nonneg(t)
    out = gauge.k ** 2 * np.maximum(arr, np.sqrt(arr))
    return float(out) if out.ndim == 0 else out


def theta_k_inverse(gauge: ThetaGauge, u):
    arr = _check_nonneg(u)
    k2 = gauge.k ** 2
    out = np.where(arr >= k2, arr / k2, (arr / k2) ** 2)
    return float(out) if out.ndim == 0 else out


@dataclass
class Violation:
    indices: tuple[int, int, int, int]
    r: float
    bracket: float
    slack: float
    inequality: str


@dataclass
class BoundReport:
    checked: int
    violations: int
    k: float
    worst: Violation | None
    enumerated: bool

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        worst = None
        if self.worst is not None:
            w = self.worst
            worst = {"indices": list(w.indices), "r": w.r, "bracket": w.bracket,
                     "slack": w.slack, "inequality": w.inequality}
        return {"checked": self.checked, "violations": self.violations, "k": self.k,
                "enumerated": self.enumerated, "passed": self.passed, "worst": worst}


def distinct_quadruples(n: int, budget: int, seed: int, enumerate_max: int = FULL_ENUMERATION_MAX_N):
    """Index arrays (a, b, c, d) of pairwise distinct points.

    Every ordered quadruple when n <= enumerate_max, otherwise `budget` uniform
    samples from a seeded generator. Returns (a, b, c, d, enumerated).
    """
    if n < 4:
        raise InsufficientPointsError("quadruple scans need at least 4 points")
    if n <= enumerate_max:
        g = np.indices((n, n, n, n)).reshape(4, -1)
        a, b, c, d = g
        keep = (a != b) & (a != c) & (a != d) & (b != c) & (b != d) & (c != d)
        return a[keep], b[keep], c[keep], d[keep], True
    rng = np.random.default_rng(seed)
    # uniform distinct 4-tuple: draw offsets so each index avoids the previous ones
    a = rng.integers(0, n, budget)
    b = rng.integers(0, n - 1, budget)
    b = b + (b >= a)
    c = rng.integers(0, n - 2, budget)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    c = c + (c >= lo)
    c = c + (c >= hi)
    d = rng.integers(0, n - 3, budget)
    s = np.sort(np.stack([a, b, c]), axis=0)
    for row in s:
        d = d + (d >= row)
    return a, b, c, d, False


def verify_bk_bounds(space: QuasiMetricSpace, sample_budget: int = 100_000, seed: int = 0,
                     k: float | None = None) -> BoundReport:
    """Check both two-sided comparisons between the cross ratio and the bracket.

    With gauge g built from K (default: the space's own coefficient), each
    quadruple must satisfy 1/g(1/r) <= <.> <= g(r) and
    g^{-1}(<.>) <= r <= 1/g^{-1}(1/<.>). A violation is counted when a left
    side exceeds its right side by more than a relative 1e-12; slack is that
    relative excess.
    """
    if space.n < 4:
        raise InsufficientPointsError("bracket bounds need at least 4 points")
    gauge = ThetaGauge(space.k_min if k is None else k)
    a, b, c, d, enumerated = distinct_quadruples(space.n, sample_budget, seed)
    rho = space.rho
    r = cross_ratios(rho, a, b, c, d)
    br = brackets(rho, a, b, c, d)
    pairs = {
        "1/g(1/r) <= bracket": (1.0 / gauge(1.0 / r), br),
        "bracket <= g(r)": (br, gauge(r)),
        "g^-1(bracket) <= r": (gauge.inverse(br), r),
        "r <= 1/g^-1(1/bracket)": (r, 1.0 / gauge.inverse(1.0 / br)),
    }
    total = np.zeros(len(r), dtype=bool)
    worst = None
    for name, (lhs, rhs) in pairs.items():
        slack = lhs / rhs - 1.0
        bad = slack > RTOL
        total |= bad
        if bad.any():
            i = int(np.argmax(slack))
            if worst is None or slack[i] > worst.slack:
                worst = Violation((int(a[i]), int(b[i]), int(c[i]), int(d[i])),
                                  float(r[i]), float(br[i]), float(slack[i]), name)
    return BoundReport(len(r), int(total.sum()), gauge.k, worst, enumerated)
