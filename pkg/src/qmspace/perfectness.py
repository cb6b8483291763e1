"""Estimators for uniform perfectness and its equivalent forms on finite samples.

Finite samples fail every one of these conditions at their own resolution,
so each estimator takes a scale window (or a distance floor) and reports
vacuity separately from failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import RTOL, DomainError, InsufficientPointsError, QuasiMetricSpace

# enumerate every triple when there are at most this many
DEFAULT_TRIPLE_BUDGET = 2_100_000
DEFAULT_PAIR_BUDGET = 256
# triples and chain endpoints are filtered at this multiple of the window floor;
# a triple exactly at the floor needs witnesses from below the sample's resolution
TRIPLE_FLOOR_FACTOR = 1.5
_BLOCK = 16_384
# the grid sweep refuses windows needing more radii than this
GRID_MAX_POINTS = 20_000_000


@dataclass(frozen=True)
class ScaleWindow:
    r_min: float
    r_max: float

    def __post_init__(self):
        if not (0 < self.r_min <= self.r_max) or not math.isfinite(self.r_max):
            raise DomainError(f"invalid scale window [{self.r_min}, {self.r_max}]")

    def scaled(self, s: float) -> "ScaleWindow":
        return ScaleWindow(self.r_min * s, self.r_max * s)

    def powered(self, p: float) -> "ScaleWindow":
        return ScaleWindow(self.r_min ** p, self.r_max ** p)

    def to_dict(self) -> dict:
        return {"r_min": self.r_min, "r_max": self.r_max}


def full_window(space: QuasiMetricSpace) -> ScaleWindow:
    """From the smallest to the largest pairwise distance."""
    off = space.rho[~np.eye(space.n, dtype=bool)]
    return ScaleWindow(float(off.min()), float(off.max()))


def resolution_window(space: QuasiMetricSpace, margin: float = 1.05) -> ScaleWindow:
    """Window starting just above the largest nearest-neighbour distance.

    Below that radius some sample point sees an empty punctured ball no
    matter how the sample was drawn; the window ends at the diameter.
    """
    lo = margin * float(space.nearest_neighbor_distances().max())
    hi = space.diameter
    return ScaleWindow(lo, max(lo, hi))


# ---------------------------------------------------------------- uniform perfectness

@dataclass
class PerfectnessReport:
    mu_hat: float
    witness: tuple[int, float] | None
    window: ScaleWindow
    vacuous: bool = False

    @property
    def positive(self) -> bool:
        return self.mu_hat > 0 and not self.vacuous

    def to_dict(self) -> dict:
        return {"mu_hat": self.mu_hat,
                "witness": {"point": self.witness[0], "radius": self.witness[1]} if self.witness else None,
                "window": self.window.to_dict(), "vacuous": self.vacuous}


def up_constant(space: QuasiMetricSpace, window: ScaleWindow) -> PerfectnessReport:
    """Largest mu such that every admissible annulus B(x,r) \\ B(x, mu r) is non-empty.

    Admissible means r in the window and some point at distance >= r from x.
    For fixed x the ratio (largest distance below r) / r is decreasing on each
    gap (d_i, d_{i+1}] of the sorted distances from x, so its infimum over the
    part of the gap inside the window sits at r = min(d_{i+1}, r_max). The
    gap (0, d_1] contributes 0: x is isolated at those radii.
    """
    best, witness = math.inf, None
    for x in range(space.n):
        ds = np.unique(space.rho[x])
        lo, hi = ds[:-1], ds[1:]
        hit = (hi >= window.r_min) & (lo < window.r_max)
        if not hit.any():
            continue
        r = np.minimum(hi[hit], window.r_max)
        vals = lo[hit] / r
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, witness = float(vals[i]), (x, float(r[i]))
    if witness is None:
        return PerfectnessReport(1.0, None, window, vacuous=True)
    return PerfectnessReport(best, witness, window)


def up_constant_grid(space: QuasiMetricSpace, window: ScaleWindow, step_factor: float = 1e-3) -> float:
    """Dense sweep over radii r_min, r_min + h, ..., r_max with h = step_factor * r_min.

    Evaluates the annulus ratio directly at every grid radius; returns 1.0
    when no grid radius is admissible.
    """
    h = step_factor * window.r_min
    if (window.r_max - window.r_min) / h > GRID_MAX_POINTS:
        raise DomainError("window too wide for a grid sweep at this step; narrow it or coarsen the step")
    grid = np.arange(window.r_min, window.r_max, h)
    grid = np.append(grid, window.r_max)
    best = 1.0
    for x in range(space.n):
        ds = np.sort(space.rho[x])
        rs = grid[grid <= ds[-1]]
        if not len(rs):
            continue
        below = ds[np.searchsorted(ds, rs, side="left") - 1]
        best = min(best, float((below / rs).min()))
    return best


# ---------------------------------------------------------------- homogeneous density

@dataclass
class HdReport:
    lambda1: float
    lambda2: float
    feasible: bool
    pair_floor: float
    vacuous: bool = False
    pairs: int = 0
    worst_pair: tuple[int, int] | None = None

    @property
    def positive(self) -> bool:
        return self.feasible and not self.vacuous

    def to_dict(self) -> dict:
        return {"lambda1": self.lambda1, "lambda2": self.lambda2, "feasible": self.feasible,
                "pair_floor": self.pair_floor, "vacuous": self.vacuous, "pairs": self.pairs,
                "worst_pair": list(self.worst_pair) if self.worst_pair else None}


def _hd_ratio_rows(space: QuasiMetricSpace, pair_floor: float):
    """Yield (a, bs, ratios) with ratios[j, x] = rho(a, x) / rho(a, bs[j]), x outside {a, b}."""
    rho = space.rho
    n = space.n
    for a in range(n):
        bs = np.flatnonzero((rho[a] >= pair_floor * (1 - RTOL)) & (np.arange(n) != a))
        if not len(bs):
            continue
        ratios = rho[a][None, :] / rho[a, bs][:, None]
        ratios[:, a] = np.nan
        ratios[np.arange(len(bs)), bs] = np.nan
        yield a, bs, ratios


def hd_interval(space: QuasiMetricSpace, lambda1: float, lambda2: float, pair_floor: float) -> HdReport:
    """Does every pair with rho(a,b) >= pair_floor admit x with lambda1 <= rho(a,x)/rho(a,b) <= lambda2?"""
    if not (0 < lambda1 <= lambda2 < 1):
        raise DomainError(f"need 0 < lambda1 <= lambda2 < 1, got [{lambda1}, {lambda2}]")
    if pair_floor <= 0:
        raise DomainError("pair_floor must be positive")
    pairs, worst = 0, None
    for a, bs, ratios in _hd_ratio_rows(space, pair_floor):
        with np.errstate(invalid="ignore"):
            inside = (ratios >= lambda1 * (1 - RTOL)) & (ratios <= lambda2 * (1 + RTOL))
        ok = inside.any(axis=1)
        pairs += len(bs)
        if worst is None and not ok.all():
            worst = (a, int(bs[np.flatnonzero(~ok)[0]]))
    if pairs == 0:
        return HdReport(lambda1, lambda2, True, pair_floor, vacuous=True)
    return HdReport(lambda1, lambda2, worst is None, pair_floor, pairs=pairs, worst_pair=worst)


def _best_interval(top: np.ndarray, values_at_least) -> tuple[float, float]:
    lam1 = float(top.min())
    return lam1, float(values_at_least(lam1))


def hd_search(space: QuasiMetricSpace, pair_floor: float) -> HdReport:
    """Feasible (lambda1, lambda2) with the largest lambda1, then the smallest lambda2.

    For a pair, the best lambda1 under any lambda2 < 1 is its largest attained
    ratio below 1; the overall optimum is the minimum of those. The smallest
    lambda2 that keeps it feasible is the largest, over pairs, of the least
    attained ratio not below that optimum.
    """
    if pair_floor <= 0:
        raise DomainError("pair_floor must be positive")
    tops, pairs, worst = [], 0, None
    rows = []
    for a, bs, ratios in _hd_ratio_rows(space, pair_floor):
        with np.errstate(invalid="ignore"):
            good = (ratios > 0) & (ratios < 1)
        top = np.where(good, ratios, -np.inf).max(axis=1)
        pairs += len(bs)
        if worst is None and np.isneginf(top).any():
            worst = (a, int(bs[np.flatnonzero(np.isneginf(top))[0]]))
        tops.append(top)
        rows.append((good, ratios))
    if pairs == 0:
        return HdReport(math.nan, math.nan, True, pair_floor, vacuous=True)
    if worst is not None:
        return HdReport(0.0, 0.0, False, pair_floor, pairs=pairs, worst_pair=worst)
    lam1 = float(np.concatenate(tops).min())
    lam2 = lam1
    for good, ratios in rows:
        cand = np.where(good & (ratios >= lam1), ratios, np.inf).min(axis=1)
        lam2 = max(lam2, float(cand.max()))
    return HdReport(lam1, lam2, True, pair_floor, pairs=pairs)


# ---------------------------------------------------------------- cross-ratio interval condition

@dataclass
class Condition4Report:
    mu1: float
    mu2: float
    feasible: bool
    vacuous: bool = False
    triples: int = 0
    enumerated: bool = True
    floor: float = 0.0
    worst_triple: tuple[int, int, int] | None = None

    @property
    def positive(self) -> bool:
        return self.feasible and not self.vacuous

    def to_dict(self) -> dict:
        return {"mu1": self.mu1, "mu2": self.mu2, "feasible": self.feasible, "vacuous": self.vacuous,
                "triples": self.triples, "enumerated": self.enumerated, "floor": self.floor,
                "worst_triple": list(self.worst_triple) if self.worst_triple else None}


def _triple_blocks(space: QuasiMetricSpace, budget: int, seed: int, floor: float):
    """Yield (a, c, d) index blocks of distinct triples with rho(a,d), rho(c,d) >= floor.

    All ordered triples when there are at most `budget`, else `budget` seeded samples.
    """
    n = space.n
    rho = space.rho
    thr = floor * (1 - RTOL)
    if n * (n - 1) * (n - 2) <= budget:
        enumerated = True
        cc, dd = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        cc, dd = cc.ravel(), dd.ravel()
        keep = (cc != dd) & (rho[cc, dd] >= thr)
        cc, dd = cc[keep], dd[keep]

        def gen():
            for a in range(n):
                m = (cc != a) & (dd != a) & (rho[a, dd] >= thr)
                yield np.full(int(m.sum()), a), cc[m], dd[m]
    else:
        enumerated = False
        rng = np.random.default_rng(seed)
        a = rng.integers(0, n, budget)
        c = rng.integers(0, n - 1, budget)
        c = c + (c >= a)
        d = rng.integers(0, n - 2, budget)
        lo, hi = np.minimum(a, c), np.maximum(a, c)
        d = d + (d >= lo)
        d = d + (d >= hi)
        keep = (rho[a, d] >= thr) & (rho[c, d] >= thr)
        a, c, d = a[keep], c[keep], d[keep]

        def gen():
            for s in range(0, len(a), _BLOCK):
                yield a[s:s + _BLOCK], c[s:s + _BLOCK], d[s:s + _BLOCK]
    return enumerated, gen()


def _cond4_values(rho: np.ndarray, a, c, d) -> np.ndarray:
    """r(a, x, c, d) for every x, NaN at x in {a, c, d}."""
    n = rho.shape[0]
    t = len(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = (rho[a, c] / rho[c, d])[:, None] * (rho[d, :] / rho[a, :])
    rows = np.arange(t)
    vals[rows, a] = np.nan
    vals[rows, c] = np.nan
    vals[rows, d] = np.nan
    return vals


def _iter_cond4(space, budget, seed, floor):
    enumerated, blocks = _triple_blocks(space, budget, seed, floor)
    for a, c, d in blocks:
        for s in range(0, len(a), _BLOCK):
            sa, sc, sd = a[s:s + _BLOCK], c[s:s + _BLOCK], d[s:s + _BLOCK]
            yield enumerated, sa, sc, sd, _cond4_values(space.rho, sa, sc, sd)


def condition4_interval(space: QuasiMetricSpace, mu1: float, mu2: float,
                        triple_budget: int = DEFAULT_TRIPLE_BUDGET, seed: int = 0,
                        floor: float = 0.0) -> Condition4Report:
    """Does every considered triple (a, c, d) admit x with mu1 <= r(a, x, c, d) <= mu2?"""
    if not (0 < mu1 <= mu2 < 1):
        raise DomainError(f"need 0 < mu1 <= mu2 < 1, got [{mu1}, {mu2}]")
    if space.n < 4:
        raise InsufficientPointsError("the cross-ratio condition needs at least 4 points")
    triples, worst, enumerated = 0, None, True
    for enumerated, a, c, d, vals in _iter_cond4(space, triple_budget, seed, floor):
        with np.errstate(invalid="ignore"):
            ok = ((vals >= mu1 * (1 - RTOL)) & (vals <= mu2 * (1 + RTOL))).any(axis=1)
        triples += len(a)
        if worst is None and not ok.all():
            i = int(np.flatnonzero(~ok)[0])
            worst = (int(a[i]), int(c[i]), int(d[i]))
    if triples == 0:
        return Condition4Report(mu1, mu2, True, vacuous=True, enumerated=enumerated, floor=floor)
    return Condition4Report(mu1, mu2, worst is None, triples=triples, enumerated=enumerated,
                            floor=floor, worst_triple=worst)


def condition4_search(space: QuasiMetricSpace, budget: int = DEFAULT_TRIPLE_BUDGET, seed: int = 0,
                      floor: float = 0.0) -> Condition4Report:
    """Feasible (mu1, mu2) with the largest mu1, then the smallest mu2.

    Same reduction as hd_search, with the attained set of a triple being
    {r(a, x, c, d) : x outside {a, c, d}} intersected with (0, 1).
    """
    if space.n < 4:
        raise InsufficientPointsError("the cross-ratio condition needs at least 4 points")
    tops, triples, worst, enumerated = [], 0, None, True
    for enumerated, a, c, d, vals in _iter_cond4(space, budget, seed, floor):
        with np.errstate(invalid="ignore"):
            top = np.where((vals > 0) & (vals < 1), vals, -np.inf).max(axis=1)
        triples += len(a)
        if worst is None and np.isneginf(top).any():
            i = int(np.flatnonzero(np.isneginf(top))[0])
            worst = (int(a[i]), int(c[i]), int(d[i]))
        tops.append(top.min() if len(top) else np.inf)
    if triples == 0:
        return Condition4Report(math.nan, math.nan, True, vacuous=True, enumerated=enumerated, floor=floor)
    if worst is not None:
        return Condition4Report(0.0, 0.0, False, triples=triples, enumerated=enumerated,
                                floor=floor, worst_triple=worst)
    mu1 = float(min(tops))
    mu2 = mu1
    for _, a, c, d, vals in _iter_cond4(space, budget, seed, floor):
        with np.errstate(invalid="ignore"):
            cand = np.where((vals >= mu1) & (vals < 1), vals, np.inf).min(axis=1)
        mu2 = max(mu2, float(cand.max()))
    return Condition4Report(mu1, mu2, True, triples=triples, enumerated=enumerated, floor=floor)


# ---------------------------------------------------------------- chains

@dataclass
class Chain:
    """Points x_{-k}, ..., x_0, ..., x_m ordered from a towards b.

    step_ratios[i] = r(a, x_{i+1}, x_i, b) for consecutive points; anchor is
    r(a, x_0, c, b) for the fixed third point c the chain started from.
    """

    a: int
    b: int
    points: list[int]
    sigma: float
    truncated: bool
    anchor: float | None = None
    c: int | None = None
    step_ratios: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "points": self.points, "sigma": self.sigma,
                "truncated": self.truncated, "anchor": self.anchor, "step_ratios": self.step_ratios}


def _pick(vals: np.ndarray, mu1: float, mu2: float) -> int | None:
    """Index of the admissible value nearest (in log scale) to sqrt(mu1 mu2); ties to the lowest index."""
    with np.errstate(invalid="ignore"):
        ok = (vals >= mu1 * (1 - RTOL)) & (vals <= mu2 * (1 + RTOL))
    if not ok.any():
        return None
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = np.abs(np.log(vals) - 0.5 * math.log(mu1 * mu2))
    gap = np.where(ok, gap, np.inf)
    best = gap.min()
    # tolerance keeps the choice stable under global rescaling of rho
    return int(np.flatnonzero(gap <= best + 1e-9)[0])


def chain_sigma(rho: np.ndarray, a: int, b: int, points) -> float:
    """max_i exp|log r(a, x_i, x_{i+1}, b)| over consecutive chain points (1.0 for < 2 points)."""
    pts = np.asarray(points, dtype=int)
    if len(pts) < 2:
        return 1.0
    x, y = pts[:-1], pts[1:]
    r = (rho[a, y] / rho[a, x]) * (rho[x, b] / rho[y, b])
    return float(np.exp(np.abs(np.log(r))).max())


def build_sigma_chain(space: QuasiMetricSpace, a: int, d: int, c: int, mu1: float, mu2: float) -> Chain:
    """Greedy chain from a to d anchored at c, each step's cross ratio inside [mu1, mu2].

    Forward: x_0 with r(a, x_0, c, d) in [mu1, mu2], then x_i with
    r(a, x_i, x_{i-1}, d) in [mu1, mu2]. Backward: x_{-i} with
    r(d, x_{-i}, x_{1-i}, a) in [mu1, mu2]. Stops (truncated) when no unused
    point qualifies; forward ratios to c shrink by at least mu2 per step so
    no point can repeat.
    """
    if a == d:
        raise DomainError("chain endpoints must differ")
    if c in (a, d):
        raise DomainError("anchor point must differ from both endpoints")
    if not (0 < mu1 <= mu2 < 1):
        raise DomainError(f"need 0 < mu1 <= mu2 < 1, got [{mu1}, {mu2}]")
    rho = space.rho
    n = space.n
    used = np.zeros(n, dtype=bool)
    used[[a, d]] = True

    def step(first, last, prev, exclude_prev):
        # r(first, x, prev, last) for all x
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = (rho[first, prev] / rho[prev, last]) * (rho[:, last] / rho[first, :])
        vals = np.where(used, np.nan, vals)
        if exclude_prev:
            vals[prev] = np.nan
        return vals

    vals = step(a, d, c, True)
    i0 = _pick(vals, mu1, mu2)
    if i0 is None:
        return Chain(a, d, [], math.inf, True, c=c)
    anchor = float(vals[i0])
    used[i0] = True
    forward = [i0]
    while True:
        vals = step(a, d, forward[-1], False)
        j = _pick(vals, mu1, mu2)
        if j is None:
            break
        used[j] = True
        forward.append(j)
    backward = []
    prev = i0
    while True:
        vals = step(d, a, prev, False)
        j = _pick(vals, mu1, mu2)
        if j is None:
            break
        used[j] = True
        backward.append(j)
        prev = j
    points = backward[::-1] + forward
    pts = np.asarray(points)
    steps = []
    if len(pts) > 1:
        x, y = pts[:-1], pts[1:]
        steps = ((rho[a, x] / rho[a, y]) * (rho[y, d] / rho[x, d])).tolist()
    return Chain(a, d, points, chain_sigma(rho, a, d, points), True, anchor, c, steps)


def chain_select_index(space: QuasiMetricSpace, chain: Chain, a: int, c: int, d: int, sigma: float) -> int | None:
    """Least i with r(a, x_i, c, d) < 1/(2 sigma^2), provided i > 0.

    Then 1/(2 sigma^2) <= r(a, x_{i-1}, c, d) <= 1/(2 sigma) whenever every
    chain step obeys the sigma bound. Returns None when the threshold is
    never crossed, or is already crossed at the first point (no predecessor
    on the finite chain).
    """
    if sigma <= 1:
        raise DomainError("sigma must exceed 1")
    if not chain.points:
        return None
    rho = space.rho
    pts = np.asarray(chain.points)
    vals = (rho[a, c] / rho[c, d]) * (rho[pts, d] / rho[a, pts])
    thr = 1.0 / (2.0 * sigma ** 2)
    below = np.flatnonzero(vals < thr * (1 - RTOL))
    if not len(below) or below[0] == 0:
        return None
    return int(below[0])


# ---------------------------------------------------------------- sigma density

@dataclass
class SigmaReport:
    sigma_hat: float
    finite: bool
    mu1: float
    mu2: float
    pairs: int = 0
    vacuous: bool = False
    worst_pair: tuple[int, int] | None = None
    floor: float = 0.0

    @property
    def positive(self) -> bool:
        return self.finite and not self.vacuous

    def to_dict(self) -> dict:
        return {"sigma_hat": self.sigma_hat if self.finite else None, "finite": self.finite,
                "mu1": self.mu1, "mu2": self.mu2, "pairs": self.pairs, "vacuous": self.vacuous,
                "worst_pair": list(self.worst_pair) if self.worst_pair else None, "floor": self.floor}


def sigma_estimate(space: QuasiMetricSpace, pair_budget: int = DEFAULT_PAIR_BUDGET, seed: int = 0,
                   floor: float = 0.0, interval: Condition4Report | None = None,
                   triple_budget: int = DEFAULT_TRIPLE_BUDGET) -> SigmaReport:
    """Largest per-step sigma over greedy chains joining sampled pairs.

    The step interval comes from condition4_search (or `interval` if given).
    Each pair (a, d) with rho(a, d) >= floor is anchored at the lowest-index
    c with rho(c, d) >= floor. Infinite when the interval search is
    infeasible or some pair admits no first step.
    """
    if space.n < 3:
        raise InsufficientPointsError("sigma chains need at least 3 points")
    rho = space.rho
    n = space.n
    thr = floor * (1 - RTOL)
    cand = np.argwhere((rho >= thr) & ~np.eye(n, dtype=bool))
    anchors = {}
    pairs = []
    for a, d in cand:
        ok = np.flatnonzero((rho[:, d] >= thr) & (np.arange(n) != a) & (np.arange(n) != d))
        if len(ok):
            pairs.append((int(a), int(d)))
            anchors[(int(a), int(d))] = int(ok[0])
    if not pairs:
        return SigmaReport(math.inf, False, math.nan, math.nan, vacuous=True, floor=floor)
    if len(pairs) > pair_budget:
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(len(pairs), size=pair_budget, replace=False))
        pairs = [pairs[i] for i in pick]
    if interval is None:
        if n < 4:
            return SigmaReport(math.inf, False, math.nan, math.nan, pairs=len(pairs), vacuous=True, floor=floor)
        interval = condition4_search(space, triple_budget, seed, floor)
    if not interval.feasible or interval.vacuous:
        return SigmaReport(math.inf, False, interval.mu1, interval.mu2, pairs=len(pairs),
                           vacuous=interval.vacuous, floor=floor)
    worst, worst_pair = 1.0, None
    for a, d in pairs:
        ch = build_sigma_chain(space, a, d, anchors[(a, d)], interval.mu1, interval.mu2)
        if not ch.points:
            return SigmaReport(math.inf, False, interval.mu1, interval.mu2, pairs=len(pairs),
                               worst_pair=(a, d), floor=floor)
        if ch.sigma > worst:
            worst, worst_pair = ch.sigma, (a, d)
    return SigmaReport(worst, True, interval.mu1, interval.mu2, pairs=len(pairs),
                       worst_pair=worst_pair, floor=floor)


def transfer_up_constant(mu: float, eta) -> float:
    """Perfectness constant of the image under an eta-quasisymmetric map.

    Uses alpha = (2M)^(-a) so that eta(alpha) = 1/2, then mu' = 1/eta(1/(mu alpha)).
    """
    if not (0 < mu < 1):
        raise DomainError(f"mu must lie in (0, 1), got {mu}")
    alpha = (2.0 * eta.m) ** (-eta.alpha)
    return 1.0 / eta(1.0 / (mu * alpha))


# ---------------------------------------------------------------- consolidated report

@dataclass
class EquivalenceReport:
    up: PerfectnessReport
    hd: HdReport
    sigma: SigmaReport
    cond4: Condition4Report

    @property
    def flags(self) -> dict[str, bool]:
        return {"uniformly_perfect": self.up.positive, "homogeneously_dense": self.hd.positive,
                "sigma_dense": self.sigma.positive, "cross_ratio_interval": self.cond4.positive}

    @property
    def consistent(self) -> bool:
        return len(set(self.flags.values())) == 1

    @property
    def all_positive(self) -> bool:
        return all(self.flags.values())

    @property
    def all_degraded(self) -> bool:
        return not any(self.flags.values())

    def to_dict(self) -> dict:
        return {"up": self.up.to_dict(), "hd": self.hd.to_dict(), "sigma": self.sigma.to_dict(),
                "cond4": self.cond4.to_dict(), "flags": self.flags, "consistent": self.consistent}


def equivalence_report(space: QuasiMetricSpace, window: ScaleWindow,
                       budget: int = DEFAULT_TRIPLE_BUDGET, seed: int = 0,
                       pair_budget: int = DEFAULT_PAIR_BUDGET) -> EquivalenceReport:
    """Run the four estimators at the resolution set by window.r_min.

    The window's lower end is the pair floor for density; triples and chain
    endpoints use TRIPLE_FLOOR_FACTOR times it. Insufficient-point cases are
    reported as vacuous rather than raised.
    """
    tfloor = TRIPLE_FLOOR_FACTOR * window.r_min
    up = up_constant(space, window)
    if space.n >= 2:
        hd = hd_search(space, window.r_min)
    else:
        hd = HdReport(math.nan, math.nan, True, window.r_min, vacuous=True)
    if space.n >= 4:
        c4 = condition4_search(space, budget, seed, tfloor)
    else:
        c4 = Condition4Report(math.nan, math.nan, True, vacuous=True, floor=tfloor)
    if space.n >= 3:
        sig = sigma_estimate(space, pair_budget, seed, tfloor, interval=c4 if space.n >= 4 else None)
    else:
        sig = SigmaReport(math.inf, False, math.nan, math.nan, vacuous=True, floor=tfloor)
    return EquivalenceReport(up, hd, sig, c4)
