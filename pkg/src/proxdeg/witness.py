"""Detectors and generators for extreme-degree witness configurations.

Two local patterns are covered. A ring witness around a center point:
k satellite points in the annulus between radii r and R, one in each of
k angular regions cut from the circle, which forces the center to have
k disk-empty neighbors. A staircase witness: k points placed one per
step on a descending diagonal of squares next to a corner point, which
forces k cone-nearest neighbors. Census functions scan a point set for
every occurrence at the scale where theory predicts a constant count.

Membership conventions: annuli are open at the inner radius and closed
at the outer, step squares are closed, all comparisons run on squared
distances or raw coordinates without epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import ParameterError
from .geom import TWO_PI, UNIT_SQUARE, PointSet, Region


def _as_points(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


def _check_positive(name, value) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ParameterError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class PearlSpec:
    """Geometry of the ring witness: k pearls in the annulus (r, R].

    The circle splits into 3k sectors of angle xi = 2*pi/(3k), numbered
    clockwise from the positive x axis. Consecutive sector pairs
    (3j-2, 3j-1) form region j and every third sector is a gap, so the
    k regions are separated. R = r/cos(xi) is the outer radius at which
    a pearl anywhere in a region still keeps the center among its two
    nearest ring neighbors.
    """

    k: int
    r: float

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 3:
            raise ParameterError(f"pearl count k must be an int >= 3, got {self.k!r}")
        _check_positive("inner radius r", self.r)

    @property
    def xi(self) -> float:
        return TWO_PI / (3 * self.k)

    @property
    def R(self) -> float:
        return self.r / math.cos(self.xi)


def pearl_region_index(center, w, spec: PearlSpec) -> int | None:
    """Region of ``w`` around ``center``: 1..k inside a region, else None.

    Membership needs both the annulus (strictly outside r, at most R) and
    a non-gap sector. Sectors are half-open clockwise, closed on the edge
    nearer the positive x axis.
    """
    dx = w[0] - center[0]
    dy = w[1] - center[1]
    if dx == 0.0 and dy == 0.0:
        raise ParameterError("w must differ from center")
    d2 = dx * dx + dy * dy
    if not (spec.r * spec.r < d2 <= spec.R * spec.R):
        return None
    clk = (-math.atan2(dy, dx)) % TWO_PI
    s = min(int(clk / spec.xi) + 1, 3 * spec.k)
    if s % 3 == 0:
        return None
    return s // 3 + 1


def _tiara_core(cx, cy, X, Y, spec: PearlSpec) -> bool:
    """Exact ring test given any superset of the points within R."""
    dx = X - cx
    dy = Y - cy
    d2 = dx * dx + dy * dy
    R2 = spec.R * spec.R
    near = (d2 > 0.0) & (d2 <= R2)
    if int(near.sum()) != spec.k:
        return False
    dx = dx[near]
    dy = dy[near]
    d2 = d2[near]
    if (d2 <= spec.r * spec.r).any():
        return False
    clk = (-np.arctan2(dy, dx)) % TWO_PI
    s = np.minimum((clk / spec.xi).astype(np.int64) + 1, 3 * spec.k)
    if (s % 3 == 0).any():
        return False
    cnt = np.bincount(s // 3 + 1, minlength=spec.k + 1)
    return bool((cnt[1:spec.k + 1] == 1).all())


def is_tiara(center, points, spec: PearlSpec) -> bool:
    """True iff the points of the set within distance R of ``center``
    (center itself excluded) are exactly one pearl per region, all
    strictly outside radius r."""
    pts = _as_points(points)
    P = pts.coords
    return _tiara_core(center[0], center[1], P[:, 0], P[:, 1], spec)


def make_tiara(spec: PearlSpec, center) -> PointSet:
    """Generate k pearls forming a ring witness around ``center``.

    Pearl j sits at radius (r + R)/2 on the boundary between the two
    sectors of region j; sector rounding on either side stays inside the
    region, so the construction is robust to the angle arithmetic.
    """
    i = np.arange(spec.k, dtype=np.float64)
    ang = -(3.0 * i + 1.0) * spec.xi
    rho = (spec.r + spec.R) / 2.0
    return PointSet(np.column_stack([
        center[0] + rho * np.cos(ang),
        center[1] + rho * np.sin(ang),
    ]))


@dataclass(frozen=True)
class StaircaseSpec:
    """Geometry of the staircase witness: the square of side r above and
    right of a corner point splits into a k-step descending diagonal of
    closed squares of side r/k."""

    k: int
    r: float

    def __post_init__(self):
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ParameterError(f"step count k must be an int >= 1, got {self.k!r}")
        _check_positive("side r", self.r)

    @property
    def step(self) -> float:
        return self.r / self.k


def _staircase_core(cx, cy, X, Y, spec: StaircaseSpec) -> bool:
    """Exact staircase test given any superset of the points within
    L-infinity distance r of the corner."""
    dx = X - cx
    dy = Y - cy
    near = (np.maximum(np.abs(dx), np.abs(dy)) <= spec.r) & ((dx != 0.0) | (dy != 0.0))
    if int(near.sum()) != spec.k:
        return False
    dx = dx[near]
    dy = dy[near]
    st = spec.r / spec.k
    i = np.arange(1, spec.k + 1, dtype=np.float64)[:, None]
    inx = (dx[None, :] >= (i - 1.0) * st) & (dx[None, :] <= i * st)
    iny = (dy[None, :] >= spec.r - i * st) & (dy[None, :] <= spec.r - (i - 1.0) * st)
    memb = inx & iny
    if not memb.any(axis=0).all():
        return False
    return bool((memb.sum(axis=1) == 1).all())


def is_staircase(center, points, spec: StaircaseSpec) -> bool:
    """True iff the points of the set within L-infinity distance r of
    ``center`` (center excluded) occupy the k steps exactly once each."""
    pts = _as_points(points)
    P = pts.coords
    return _staircase_core(center[0], center[1], P[:, 0], P[:, 1], spec)


def make_staircase(spec: StaircaseSpec, center) -> PointSet:
    """Generate k points, one at the center of each step square."""
    i = np.arange(1, spec.k + 1, dtype=np.float64)
    off = (2.0 * i - 1.0) * spec.r / (2.0 * spec.k)
    return PointSet(
        np.column_stack([center[0] + off, center[1] + (spec.r - off)])
    )


# ---------------------------------------------------------------------------
# Census scans


def _witness_count(n: int, c: float, kmin: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 16:
        raise ParameterError(f"census needs n >= 16, got {n!r}")
    c = _check_positive("scale constant c", c)
    return max(kmin, int(c * math.log(n) / math.log(math.log(n))))


def jewel_scale(n: int, c: float = 1.0) -> tuple[int, float]:
    """(k, r) used by the ring census at set size n: k grows like
    c*log(n)/log(log(n)) and r = 1/sqrt(n)."""
    return _witness_count(n, c, kmin=3), 1.0 / math.sqrt(n)


def staircase_scale(n: int, c: float = 1.0) -> tuple[int, float]:
    """(k, r) used by the staircase census at set size n: same k growth,
    r = sqrt(2/n)."""
    return _witness_count(n, c, kmin=1), math.sqrt(2.0 / n)


def _census_support(support: Region | None) -> Region:
    """Both census scans are defined on the unit square only; the scale
    formulas and the perimeter margins assume it."""
    if support is None:
        return Region.unit_square()
    if not isinstance(support, Region) or support.kind != UNIT_SQUARE:
        raise ParameterError(
            f"witness census supports the unit square only, got {support!r}"
        )
    return support


def find_jewels(points, c: float = 1.0, support: Region | None = None) -> np.ndarray:
    """Indices of points whose neighborhood is a ring witness at the
    census scale. Candidates must clear the square's perimeter by 2r so
    the whole ring fits inside the support."""
    _census_support(support)
    pts = _as_points(points)
    n = pts.n
    k, r = jewel_scale(n, c)
    spec = PearlSpec(k, r)
    P = pts.coords
    x = P[:, 0]
    y = P[:, 1]
    clear = np.minimum(np.minimum(x, 1.0 - x), np.minimum(y, 1.0 - y))
    cand = np.flatnonzero(clear >= 2.0 * r)
    if len(cand) == 0:
        return cand
    tree = cKDTree(P)
    R_fetch = spec.R * (1.0 + 1e-9)
    counts = tree.query_ball_point(P[cand], R_fetch, return_length=True)
    cand = cand[counts >= k + 1]
    if len(cand) == 0:
        return cand
    balls = tree.query_ball_point(P[cand], R_fetch)
    hits = []
    for ci, mem in zip(cand, balls):
        mi = np.asarray(mem, dtype=np.int64)
        if _tiara_core(P[ci, 0], P[ci, 1], P[mi, 0], P[mi, 1], spec):
            hits.append(int(ci))
    return np.asarray(hits, dtype=np.int64)


def count_jewels(points, c: float = 1.0, support: Region | None = None) -> int:
    """Number of ring witnesses in the set at the census scale."""
    return int(len(find_jewels(points, c, support)))


def find_staircases(points, c: float = 1.0, support: Region | None = None) -> np.ndarray:
    """Indices of points whose neighborhood is a staircase witness at the
    census scale. Candidates keep their full L-infinity ball inside the
    square."""
    _census_support(support)
    pts = _as_points(points)
    n = pts.n
    k, r = staircase_scale(n, c)
    spec = StaircaseSpec(k, r)
    P = pts.coords
    x = P[:, 0]
    y = P[:, 1]
    cand = np.flatnonzero((x >= r) & (x <= 1.0 - r) & (y >= r) & (y <= 1.0 - r))
    if len(cand) == 0:
        return cand
    tree = cKDTree(P)
    r_fetch = r * (1.0 + 1e-9)
    counts = tree.query_ball_point(P[cand], r_fetch, p=np.inf, return_length=True)
    cand = cand[counts >= k + 1]
    if len(cand) == 0:
        return cand
    balls = tree.query_ball_point(P[cand], r_fetch, p=np.inf)
    hits = []
    for ci, mem in zip(cand, balls):
        mi = np.asarray(mem, dtype=np.int64)
        if _staircase_core(P[ci, 0], P[ci, 1], P[mi, 0], P[mi, 1], spec):
            hits.append(int(ci))
    return np.asarray(hits, dtype=np.int64)


def count_staircases(points, c: float = 1.0, support: Region | None = None) -> int:
    """Number of staircase witnesses in the set at the census scale."""
    return int(len(find_staircases(points, c, support)))


# ---------------------------------------------------------------------------
# Coordinatewise extrema


def count_maxima(points) -> int:
    """Number of points no other point beats strictly in both
    coordinates."""
    pts = _as_points(points)
    P = pts.coords
    n = len(P)
    if n == 0:
        return 0
    x = P[:, 0]
    y = P[:, 1]
    order = np.argsort(-x, kind="stable")
    xs = x[order]
    ys = y[order]
    if n == 1 or (xs[1:] != xs[:-1]).all():
        best = np.maximum.accumulate(np.concatenate([[-np.inf], ys[:-1]]))
        return int((ys >= best).sum())
    # tied x values: points in the same column cannot dominate each other
    total = 0
    best = -np.inf
    lo = 0
    while lo < n:
        hi = lo
        while hi < n and xs[hi] == xs[lo]:
            hi += 1
        grp = ys[lo:hi]
        total += int((grp >= best).sum())
        m = float(grp.max())
        if m > best:
            best = m
        lo = hi
    return total


def count_minima(points) -> int:
    """Number of points no other point beats strictly downward in both
    coordinates."""
    pts = _as_points(points)
    if pts.n == 0:
        return 0
    return count_maxima(PointSet(-pts.coords))
