"""Inversion of a quasi-metric about one of its points, and Euclidean inversion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, InsufficientPointsError, QuasiMetricSpace, euclidean_space


@dataclass(frozen=True)
class InversionParams:
    center: int
    radius: float | None = None  # None means the diameter

    def resolve(self, space: QuasiMetricSpace) -> tuple[int, float]:
        if not 0 <= self.center < space.n:
            raise DomainError(f"center {self.center} out of range for {space.n} points")
        r = space.diameter if self.radius is None else float(self.radius)
        if not r > 0:
            raise DomainError(f"inversion radius must be positive, got {r}")
        return self.center, r


def invert_space(space: QuasiMetricSpace, params: InversionParams, keep_center: bool = False) -> QuasiMetricSpace:
    """rho_p(x, y) = r^2 rho(x, y) / (rho(x, p) rho(y, p)) on the points other than p.

    With keep_center the center stays, at distance r^2 / rho(x, p) from x;
    applying the same inversion twice then returns the original space.
    """
    if space.n < 3:
        raise InsufficientPointsError("inversion needs at least 3 points")
    p, r = params.resolve(space)
    rho = space.rho
    dp = rho[:, p].copy()
    dp[p] = 1.0
    out = (r * r) * rho / np.outer(dp, dp)
    if keep_center:
        out[p, :] = out[:, p] = (r * r) / dp
        out[p, p] = 0.0
        keep = np.arange(space.n)
    else:
        keep = np.flatnonzero(np.arange(space.n) != p)
    out = out[np.ix_(keep, keep)]
    np.fill_diagonal(out, 0.0)
    labels = tuple(space.labels[i] for i in keep) if space.labels else ()
    name = f"inverted({space.name},{p})" if space.name else ""
    return QuasiMetricSpace(out, labels, name)


def invert_euclidean_cloud(points, exclude_origin: bool = False) -> np.ndarray:
    """x -> x / |x|^2 row-wise; points at the origin raise unless excluded."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    norms2 = (pts ** 2).sum(axis=1)
    at_origin = norms2 == 0
    if at_origin.any():
        if not exclude_origin:
            raise DomainError(f"point {int(np.flatnonzero(at_origin)[0])} lies at the origin")
        pts, norms2 = pts[~at_origin], norms2[~at_origin]
    return pts / norms2[:, None]


def inverted_euclidean_space(points, exclude_origin: bool = False, name: str = "") -> QuasiMetricSpace:
    return euclidean_space(invert_euclidean_cloud(points, exclude_origin), name=name)
