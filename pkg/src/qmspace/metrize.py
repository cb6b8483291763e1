"""Chain metrization of a quasi-metric: d(x,y) = inf over chains of sum rho^eps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RTOL, DomainError, QuasiMetricSpace

# K^eps may land a few ulps above 2 when K is computed from floats (K = 4.0000000000000004)
GUARANTEE_SLACK = 1e-9


@dataclass
class MetrizationResult:
    epsilon: float
    d_matrix: np.ndarray
    min_ratio: float
    worst_pair: tuple[int, int] | None
    guarantee_active: bool

    def as_space(self, source: QuasiMetricSpace) -> QuasiMetricSpace:
        name = f"metrized({source.name},{self.epsilon:g})" if source.name else ""
        return QuasiMetricSpace(self.d_matrix, source.labels, name)

    def to_dict(self) -> dict:
        return {"epsilon": self.epsilon, "min_ratio": self.min_ratio,
                "worst_pair": list(self.worst_pair) if self.worst_pair else None,
                "guarantee_active": self.guarantee_active}


def shortest_path_closure(w: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths on a dense complete graph (Floyd-Warshall)."""
    d = np.array(w, dtype=float, copy=True)
    for k in range(d.shape[0]):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def chain_metric(space: QuasiMetricSpace, epsilon: float) -> MetrizationResult:
    if not (0 < epsilon <= 1):
        raise DomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    w = space.rho ** epsilon
    d = shortest_path_closure(w)
    np.fill_diagonal(d, 0.0)
    # keep the matrix exactly symmetric
    d = np.minimum(d, d.T)
    if space.n >= 2:
        off = ~np.eye(space.n, dtype=bool)
        ratio = np.where(off, d / np.where(off, w, 1.0), np.inf)
        i, j = np.unravel_index(np.argmin(ratio), ratio.shape)
        min_ratio, worst = float(ratio[i, j]), (int(i), int(j))
        active = space.k_min ** epsilon <= 2.0 * (1 + GUARANTEE_SLACK)
    else:
        min_ratio, worst, active = 1.0, None, True
    return MetrizationResult(float(epsilon), d, min_ratio, worst, bool(active))


@dataclass
class FrinkReport:
    passed: bool
    upper_ok: bool
    lower_ok: bool | None
    min_ratio: float
    worst_pair: tuple[int, int] | None
    guarantee_active: bool
    epsilon: float

    def to_dict(self) -> dict:
        return {"passed": self.passed, "upper_ok": self.upper_ok, "lower_ok": self.lower_ok,
                "min_ratio": self.min_ratio,
                "worst_pair": list(self.worst_pair) if self.worst_pair else None,
                "guarantee_active": self.guarantee_active, "epsilon": self.epsilon}


def verify_frink_bounds(space: QuasiMetricSpace, epsilon: float) -> FrinkReport:
    """Check d <= rho^eps always, and d >= rho^eps / 4 when K^eps <= 2.

    When K^eps > 2 the lower comparison is not guaranteed; it is left
    unasserted (lower_ok is None) and min_ratio is only reported.
    """
    res = chain_metric(space, epsilon)
    w = space.rho ** epsilon
    upper_ok = bool(np.all(res.d_matrix <= w * (1 + RTOL)))
    lower_ok = None
    if res.guarantee_active:
        lower_ok = bool(np.all(res.d_matrix >= 0.25 * w * (1 - RTOL)))
    passed = upper_ok and lower_ok is not False
    return FrinkReport(passed, upper_ok, lower_ok, res.min_ratio, res.worst_pair,
                       res.guarantee_active, res.epsilon)


def triangle_violations(d: np.ndarray, rtol: float = RTOL) -> int:
    """Number of ordered triples with d(i,k) > d(i,j) + d(j,k) beyond rtol."""
    count = 0
    for j in range(d.shape[0]):
        through = d[:, j, None] + d[None, j, :]
        count += int(np.count_nonzero(d > through * (1 + rtol)))
    return count
