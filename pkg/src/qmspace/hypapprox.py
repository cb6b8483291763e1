"""Hyperbolic approximation graph over nested nets, and its base-point boundary."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.stats import spearmanr

from .core import DomainError, InsufficientPointsError, QuasiMetricError, QuasiMetricSpace, validate_space


class ConstructionError(QuasiMetricError, RuntimeError):
    pass


@dataclass(frozen=True)
class HypVertex:
    level: int
    center: int


@dataclass
class HypGraph:
    r: float
    levels: int
    vertices: list[HypVertex]
    edges: np.ndarray  # (m, 2) vertex index pairs, i < j
    scales: list[float]
    space: QuasiMetricSpace = field(repr=False)
    root: int = 0

    @property
    def deepest(self) -> np.ndarray:
        return np.array([i for i, v in enumerate(self.vertices) if v.level == self.levels])

    def level_counts(self) -> list[int]:
        counts = [0] * (self.levels + 1)
        for v in self.vertices:
            counts[v.level] += 1
        return counts

    def adjacency(self) -> sparse.csr_matrix:
        m = len(self.vertices)
        e = self.edges
        data = np.ones(2 * len(e))
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(m, m))

    def distances(self, sources=None) -> np.ndarray:
        """Unit-edge graph distances from `sources` (all vertices by default)."""
        return shortest_path(self.adjacency(), unweighted=True, directed=False, indices=sources)

    def to_json(self) -> dict:
        return {"r": self.r, "levels": self.levels,
                "vertices": [{"level": v.level, "center": v.center} for v in self.vertices],
                "edges": self.edges.tolist()}


def greedy_net(rho: np.ndarray, scale: float, candidates=None) -> list[int]:
    """Maximal subset with pairwise distances > scale, scanned from the lowest index."""
    idx = np.arange(rho.shape[0]) if candidates is None else np.asarray(candidates)
    chosen: list[int] = []
    free = np.ones(rho.shape[0], dtype=bool)
    for i in idx:
        if free[i]:
            chosen.append(int(i))
            free &= rho[i] > scale
    return chosen


def build_hyperbolic_approximation(space: QuasiMetricSpace, r: float, levels: int) -> HypGraph:
    """Leveled net graph: level k is a greedy maximal diam*r^k-separated set.

    (k, z) and (k', z') are joined when |k - k'| <= 1 and
    rho(z, z') <= 2 K max(scale_k, scale_k'), K the space's coefficient.
    """
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    if levels < 1:
        raise DomainError("need at least one level below the root")
    if space.n < 2:
        raise InsufficientPointsError("hyperbolic approximation needs at least 2 points")
    rho = space.rho
    diam = space.diameter
    k = space.k_min
    scales = [diam * r ** lv for lv in range(levels + 1)]
    vertices: list[HypVertex] = []
    by_level: list[np.ndarray] = []
    for lv, sc in enumerate(scales):
        net = greedy_net(rho, sc)
        by_level.append(np.arange(len(vertices), len(vertices) + len(net)))
        vertices.extend(HypVertex(lv, z) for z in net)
    centers = np.array([v.center for v in vertices])
    edges = []
    for lv in range(levels + 1):
        for nxt in (lv, lv + 1):
            if nxt > levels:
                continue
            a, b = by_level[lv], by_level[nxt]
            thr = 2.0 * k * max(scales[lv], scales[nxt])
            close = rho[np.ix_(centers[a], centers[b])] <= thr
            ii, jj = np.nonzero(close)
            pairs = np.stack([a[ii], b[jj]], axis=1)
            pairs = pairs[pairs[:, 0] != pairs[:, 1]]
            if nxt == lv:
                pairs = pairs[pairs[:, 0] < pairs[:, 1]]
            edges.append(pairs)
    edges = np.concatenate(edges).astype(int) if edges else np.empty((0, 2), dtype=int)
    graph = HypGraph(float(r), int(levels), vertices, edges, scales, space)
    ncomp, lab = connected_components(graph.adjacency(), directed=False)
    if ncomp > 1:
        lone = int(np.flatnonzero(lab != lab[graph.root])[0])
        raise ConstructionError(f"graph is disconnected; vertex {lone} {vertices[lone]} is unreachable")
    return graph


def gromov_product_matrix(graph: HypGraph) -> np.ndarray:
    """(v|w)_o = (|v,o| + |w,o| - |v,w|) / 2 over the deepest-level vertices."""
    deep = graph.deepest
    dist = graph.distances(deep)[:, deep]
    to_root = graph.distances([graph.root])[0, deep]
    return 0.5 * (to_root[:, None] + to_root[None, :] - dist)


@dataclass
class BoundaryEstimate:
    space: QuasiMetricSpace
    a: float
    assignment: np.ndarray  # original point -> deepest-level vertex position
    floored_pairs: int
    floor: float

    @property
    def floored(self) -> bool:
        return self.floored_pairs > 0

    def to_dict(self) -> dict:
        return {"a": self.a, "floored_pairs": self.floored_pairs, "floor": self.floor,
                "k_min": self.space.k_min, "assignment": self.assignment.tolist()}


def boundary_quasimetric(graph: HypGraph, a: float | None = None) -> BoundaryEstimate:
    """Distances a^-(v_z|v_y)_o between originals, v_z the nearest deepest center.

    Distinct originals that share a center are set to a^-(L+1) and counted
    in floored_pairs.
    """
    a = 1.0 / graph.r if a is None else float(a)
    if not a > 1:
        raise DomainError(f"visual base must exceed 1, got {a}")
    space = graph.space
    deep = graph.deepest
    centers = np.array([graph.vertices[i].center for i in deep])
    # argmin returns the first minimum, i.e. the lowest-index center on ties
    assign = np.argmin(space.rho[:, centers], axis=1)
    gp = gromov_product_matrix(graph)
    g = gp[np.ix_(assign, assign)]
    out = a ** (-g)
    floor = a ** (-(graph.levels + 1))
    same = (assign[:, None] == assign[None, :])
    np.fill_diagonal(same, False)
    out[same] = floor
    np.fill_diagonal(out, 0.0)
    rep = validate_space(out)
    if not rep.passed:
        raise ConstructionError(f"boundary distances fail the axioms at {rep.offending}")
    name = f"boundary({space.name})" if space.name else ""
    bspace = QuasiMetricSpace(out, space.labels, name)
    return BoundaryEstimate(bspace, a, assign, int(same.sum()) // 2, floor)


@dataclass
class BoundaryComparison:
    gamma_hat: float
    intercept: float
    residual_spread: float
    rank_correlation: float
    pairs: int

    def to_dict(self) -> dict:
        return {"gamma_hat": self.gamma_hat, "intercept": self.intercept,
                "residual_spread": self.residual_spread, "rank_correlation": self.rank_correlation,
                "pairs": self.pairs}


def boundary_comparison(original: QuasiMetricSpace, boundary: QuasiMetricSpace) -> BoundaryComparison:
    """Fit log(boundary) = gamma log(original) + c over all pairs, plus rank agreement."""
    if original.n != boundary.n:
        raise DomainError("spaces must share their point set")
    iu = np.triu_indices(original.n, 1)
    if len(iu[0]) < 3:
        raise InsufficientPointsError("comparison needs at least 3 pairs")
    x = np.log(original.rho[iu])
    y = np.log(boundary.rho[iu])
    if np.ptp(x) == 0:
        raise DomainError("original distances are all equal; the exponent is undetermined")
    gamma, c = np.polyfit(x, y, 1)
    res = y - (gamma * x + c)
    rho_s = spearmanr(x, y).statistic
    rank = 1.0 if np.ptp(y) == 0 and np.ptp(x) == 0 else float(rho_s)
    return BoundaryComparison(float(gamma), float(c), float(np.ptp(res)), rank, len(x))
