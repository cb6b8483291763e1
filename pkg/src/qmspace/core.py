"""Finite quasi-metric spaces: representation, validation and generators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

# relative slack used when comparing floating distances against thresholds
RTOL = 1e-12


class QuasiMetricError(Exception):
    """Base class for all errors raised by this package."""


class MalformedInputError(QuasiMetricError, ValueError):
    pass


class DomainError(QuasiMetricError, ValueError):
    pass


class InsufficientPointsError(QuasiMetricError, ValueError):
    pass


class SpecError(QuasiMetricError, ValueError):
    pass


@dataclass(frozen=True)
class AxiomReport:
    square: bool
    zero_diagonal: bool
    symmetric: bool
    positive: bool
    finite_k: bool
    offending: tuple[int, ...] | None = None
    k_min: float | None = None

    @property
    def passed(self) -> bool:
        return self.square and self.zero_diagonal and self.symmetric and self.positive and self.finite_k

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "square": self.square,
            "zero_diagonal": self.zero_diagonal,
            "symmetric": self.symmetric,
            "positive": self.positive,
            "finite_k": self.finite_k,
            "offending": list(self.offending) if self.offending is not None else None,
            "k_min": self.k_min,
        }


def validate_space(rho) -> AxiomReport:
    """Check the quasi-metric axioms on a distance matrix.

    Raises MalformedInputError for non-square input or negative entries;
    every other axiom failure is reported, with the first offending pair.
    The input is never modified.
    """
    try:
        m = np.array(rho, dtype=float)
    except (TypeError, ValueError) as exc:
        raise MalformedInputError(f"distance matrix is not numeric: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise MalformedInputError(f"distance matrix must be square and non-empty, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MalformedInputError("distance matrix has non-finite entries")
    if np.any(m < 0):
        i, j = np.argwhere(m < 0)[0]
        raise MalformedInputError(f"negative distance at ({i}, {j})")

    n = m.shape[0]
    diag = np.diag(m)
    if np.any(diag != 0):
        i = int(np.flatnonzero(diag != 0)[0])
        return AxiomReport(True, False, True, True, True, (i, i))
    asym = np.argwhere(m != m.T)
    if len(asym):
        i, j = (int(v) for v in asym[0])
        return AxiomReport(True, True, False, True, True, (i, j))
    off = ~np.eye(n, dtype=bool)
    zeros = np.argwhere((m == 0) & off)
    if len(zeros):
        i, j = (int(v) for v in zeros[0])
        return AxiomReport(True, True, True, False, True, (i, j))
    # a finite matrix with positive off-diagonal entries always has finite K
    k = _scan_k(m) if n >= 2 else 1.0
    return AxiomReport(True, True, True, True, bool(np.isfinite(k)), None, k)


def _scan_k(rho: np.ndarray) -> float:
    n = rho.shape[0]
    best = 1.0
    for j in range(n):
        col = rho[:, j]
        denom = np.maximum(col[:, None], col[None, :])
        denom[j, :] = np.inf
        denom[:, j] = np.inf
        ratio = rho / denom
        best = max(best, float(ratio.max()))
    return best


@dataclass(frozen=True, eq=False)
class QuasiMetricSpace:
    """A finite labelled point set with a symmetric distance matrix."""

    rho: np.ndarray
    labels: tuple[str, ...] = ()
    name: str = ""
    coords: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise MalformedInputError(f"distance matrix must be square, got shape {rho.shape}")
        labels = tuple(str(s) for s in self.labels) if len(self.labels) else tuple(str(i) for i in range(rho.shape[0]))
        if len(labels) != rho.shape[0]:
            raise MalformedInputError(f"{len(labels)} labels for {rho.shape[0]} points")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.rho.shape[0]

    def __len__(self) -> int:
        return self.n

    @cached_property
    def k_min(self) -> float:
        return min_quasimetric_coefficient(self)

    @property
    def diameter(self) -> float:
        return float(self.rho.max())

    def scaled(self, s: float) -> "QuasiMetricSpace":
        return QuasiMetricSpace(self.rho * s, self.labels, self.name)

    def subspace(self, idx: Sequence[int]) -> "QuasiMetricSpace":
        idx = list(idx)
        return QuasiMetricSpace(self.rho[np.ix_(idx, idx)], [self.labels[i] for i in idx], self.name)

    def nearest_neighbor_distances(self) -> np.ndarray:
        off = self.rho + np.diag(np.full(self.n, np.inf))
        return off.min(axis=1)

    def to_json(self) -> dict:
        return {"name": self.name, "labels": list(self.labels), "rho": self.rho.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "QuasiMetricSpace":
        try:
            rho = obj["rho"]
        except (KeyError, TypeError) as exc:
            raise MalformedInputError("space JSON needs a 'rho' matrix") from exc
        report = validate_space(rho)
        if not report.passed:
            raise DomainError(f"space violates quasi-metric axioms: {report.to_dict()}")
        return cls(np.asarray(rho, dtype=float), obj.get("labels") or (), obj.get("name", ""))


def save_space(space: QuasiMetricSpace, path) -> None:
    Path(path).write_text(json.dumps(space.to_json()))


def load_space(path) -> QuasiMetricSpace:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"{path}: invalid JSON ({exc})") from exc
    return QuasiMetricSpace.from_json(obj)


def min_quasimetric_coefficient(space: QuasiMetricSpace) -> float:
    """Smallest K with rho(i,k) <= K max(rho(i,j), rho(j,k)) over all triples.

    Exact O(n^3) scan, clamped below at 1 (so two-point spaces report 1).
    """
    if space.n < 2:
        raise InsufficientPointsError("quasi-metric coefficient needs at least 2 points")
    return _scan_k(space.rho)


def snowflake_transform(space: QuasiMetricSpace, p: float) -> QuasiMetricSpace:
    if p < 1:
        raise DomainError(f"snowflake exponent must be >= 1, got {p}")
    name = f"{space.name}^{float(p):g}" if space.name else ""
    return QuasiMetricSpace(space.rho ** float(p), space.labels, name)


def euclidean_space(points, name: str = "", labels=()) -> QuasiMetricSpace:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    diff = pts[:, None, :] - pts[None, :, :]
    rho = np.sqrt((diff ** 2).sum(axis=-1))
    return QuasiMetricSpace(rho, labels, name, coords=pts)


# ---------------------------------------------------------------- generators

@dataclass(frozen=True)
class SpaceGeneratorSpec:
    kind: str
    params: dict

    def to_json(self) -> dict:
        out = {}
        for k, v in self.params.items():
            if isinstance(v, Fraction):
                v = str(v)
            elif isinstance(v, QuasiMetricSpace):
                v = v.name or "<space>"
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            out[k] = v
        return {"kind": self.kind, "params": out}


def cantor_points(ratio, depth: int) -> list[Fraction]:
    """Endpoints of the depth-`depth` intervals of the middle-gap Cantor construction on [0, 1]."""
    c = _as_fraction(ratio)
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            w = (b - a) * c
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        intervals = nxt
    return sorted({x for iv in intervals for x in iv})


def _as_fraction(x) -> Fraction:
    # floats that are within rounding of a small rational (1/3, 0.25, ...) snap to it
    if isinstance(x, float):
        snapped = Fraction(x).limit_denominator(10**6)
        return snapped if abs(float(snapped) - x) <= 4e-16 * abs(x) else Fraction(x)
    return Fraction(x)


def generate_space(spec: SpaceGeneratorSpec) -> QuasiMetricSpace:
    p = spec.params
    if spec.kind == "cantor":
        c, m = p.get("ratio"), p.get("depth")
        if c is None or m is None:
            raise SpecError("cantor needs 'ratio' and 'depth'")
        c = _as_fraction(c)
        if not (0 < c < Fraction(1, 2)):
            raise SpecError(f"cantor ratio must lie in (0, 1/2), got {c}")
        if int(m) != m or m < 0:
            raise SpecError(f"cantor depth must be a non-negative integer, got {m}")
        pts = cantor_points(c, int(m))
        return euclidean_space([float(x) for x in pts], name=f"cantor({c},{int(m)})")
    if spec.kind == "geometric":
        q, mode, count = p.get("base"), p.get("mode", "linear"), p.get("count")
        if q is None or count is None:
            raise SpecError("geometric needs 'base' and 'count'")
        q = float(Fraction(q)) if isinstance(q, (str, Fraction)) else float(q)
        if not (0 < q < 1):
            raise SpecError(f"geometric base must lie in (0, 1), got {q}")
        if mode not in ("linear", "squared"):
            raise SpecError(f"geometric mode must be 'linear' or 'squared', got {mode!r}")
        if int(count) != count or count < 1:
            raise SpecError(f"geometric count must be a positive integer, got {count}")
        ks = np.arange(1, int(count) + 1, dtype=float)
        expo = ks if mode == "linear" else ks ** 2
        pts = np.concatenate([[0.0], q ** expo])
        if np.any(pts[1:] == 0):
            raise SpecError("geometric points underflow to zero; reduce count")
        return euclidean_space(pts, name=f"geometric({q:g},{mode},{int(count)})")
    if spec.kind == "snowflake":
        base, expo = p.get("base"), p.get("exponent")
        if not isinstance(base, QuasiMetricSpace):
            base = generate_space(base) if isinstance(base, SpaceGeneratorSpec) else None
        if base is None or expo is None:
            raise SpecError("snowflake needs a base space and an 'exponent'")
        try:
            return snowflake_transform(base, float(Fraction(expo)) if isinstance(expo, str) else float(expo))
        except DomainError as exc:
            raise SpecError(str(exc)) from exc
    if spec.kind == "euclidean_cloud":
        coords = p.get("coords")
        if coords is None or len(coords) == 0:
            raise SpecError("euclidean_cloud needs a non-empty 'coords' list")
        space = euclidean_space(coords, name=p.get("name", "cloud"))
        if space.n > 1 and not validate_space(space.rho).passed:
            raise SpecError("euclidean_cloud has duplicate points")
        return space
    raise SpecError(f"unknown generator kind {spec.kind!r}")


def cantor(ratio=Fraction(1, 3), depth: int = 4) -> QuasiMetricSpace:
    return generate_space(SpaceGeneratorSpec("cantor", {"ratio": ratio, "depth": depth}))


def geometric(base=0.5, mode: str = "linear", count: int = 8) -> QuasiMetricSpace:
    return generate_space(SpaceGeneratorSpec("geometric", {"base": base, "mode": mode, "count": count}))


def arithmetic_grid(n: int) -> QuasiMetricSpace:
    """n equally spaced points on [0, 1]."""
    return euclidean_space(np.linspace(0.0, 1.0, n), name=f"grid({n})")


def perturbed_metric_space(n: int, seed: int, dim: int = 2, spread: float = 0.5) -> QuasiMetricSpace:
    """Random Euclidean cloud whose distances are multiplied by symmetric factors in [1, 1+spread].

    The result is a quasi-metric (generally not a metric) with K <= 2(1+spread).
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n, dim))
    base = euclidean_space(pts).rho
    f = rng.uniform(1.0, 1.0 + spread, size=(n, n))
    f = np.triu(f, 1)
    f = f + f.T + np.eye(n)
    return QuasiMetricSpace(base * f, name=f"perturbed(n={n},seed={seed})")
