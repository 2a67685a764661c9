"""Proximity-graph builders over planar point sets.

Public builders: ``gabriel``, ``rng_graph``, ``yao`` and
``unit_disk_graph``, plus quadratic reference implementations
(``gabriel_naive``, ``rng_naive``) kept as oracles for tests.

The Gabriel and relative-neighborhood builders share an exact pipeline
that avoids the all-pairs scan:

1. candidate pairs closer than a window radius come from a KD-tree;
2. a vectorized probe of the 3x3 grid block around each pair midpoint
   kills most non-edges; short pairs whose empty region fits inside a
   fully-enumerated block are certified as edges on the spot;
3. the remaining pairs get an exact emptiness test against the points
   returned by a ball query that covers the whole region;
4. pairs longer than the window are recovered separately: such an edge
   leaves the grid cell holding its midpoint empty, with nearest-point
   clearance at least half the edge length minus the cell half-diagonal,
   so scanning high-clearance empty cells is a complete search.

Kills and acceptances both evaluate the open-region predicates from
``geom`` on raw float64 values, so results match the quadratic
references bit for bit. The grid assumes roughly uniform density for
speed; correctness does not depend on it.
"""

from __future__ import annotations

import math
from itertools import chain

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .errors import ParameterError
from .geom import TWO_PI, ConeSpec, PointSet

GABRIEL = "gabriel"
RNG = "rng"

# slots per grid cell kept for the vectorized probe; fuller cells fall
# through to the ball-query test
_PAD = 4

_NEIGHBOR_OFFSETS = (
    (0, 0),
    (-1, 0), (1, 0), (0, -1), (0, 1),
    (-1, -1), (-1, 1), (1, -1), (1, 1),
)


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are canonical: an (m, 2) int64 array with ``edges[:, 0] <
    edges[:, 1]``, lexicographically sorted and free of duplicates.
    """

    __slots__ = ("n", "_edges", "_adj")

    def __init__(self, n, edges=None):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
            raise ParameterError(f"vertex count must be a nonnegative int, got {n!r}")
        n = int(n)
        if edges is None:
            e = np.empty((0, 2), dtype=np.int64)
        else:
            e = np.asarray(edges, dtype=np.int64)
            if e.size == 0:
                e = np.empty((0, 2), dtype=np.int64)
            elif e.ndim != 2 or e.shape[1] != 2:
                raise ParameterError(f"edges must be an (m, 2) array, got shape {e.shape}")
            else:
                if e.min() < 0 or e.max() >= n:
                    raise ParameterError("edge endpoint out of range")
                if (e[:, 0] == e[:, 1]).any():
                    raise ParameterError("self loops are not allowed")
                e = np.unique(np.sort(e, axis=1), axis=0)
        e.setflags(write=False)
        self.n = n
        self._edges = e
        self._adj = None

    @property
    def edges(self) -> np.ndarray:
        return self._edges

    @property
    def edge_count(self) -> int:
        return int(len(self._edges))

    def degrees(self) -> np.ndarray:
        """Vertex degrees as an int64 array of length n."""
        deg = np.zeros(self.n, dtype=np.int64)
        if len(self._edges):
            deg += np.bincount(self._edges[:, 0], minlength=self.n)
            deg += np.bincount(self._edges[:, 1], minlength=self.n)
        return deg

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor indices of vertex ``v``."""
        if not 0 <= v < self.n:
            raise ParameterError(f"vertex {v} out of range for n={self.n}")
        if self._adj is None:
            e = self._edges
            src = np.concatenate([e[:, 0], e[:, 1]])
            dst = np.concatenate([e[:, 1], e[:, 0]])
            order = np.lexsort((dst, src))
            src = src[order]
            indptr = np.searchsorted(src, np.arange(self.n + 1))
            self._adj = (indptr, dst[order])
        indptr, dst = self._adj
        return dst[indptr[v]:indptr[v + 1]]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._edges, other._edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


class DiGraph:
    """Directed simple graph; arcs stored as a lexicographically sorted
    distinct (m, 2) int64 array of (tail, head) pairs.
    """

    __slots__ = ("n", "_arcs")

    def __init__(self, n, arcs=None):
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 0:
            raise ParameterError(f"vertex count must be a nonnegative int, got {n!r}")
        n = int(n)
        if arcs is None:
            a = np.empty((0, 2), dtype=np.int64)
        else:
            a = np.asarray(arcs, dtype=np.int64)
            if a.size == 0:
                a = np.empty((0, 2), dtype=np.int64)
            elif a.ndim != 2 or a.shape[1] != 2:
                raise ParameterError(f"arcs must be an (m, 2) array, got shape {a.shape}")
            else:
                if a.min() < 0 or a.max() >= n:
                    raise ParameterError("arc endpoint out of range")
                if (a[:, 0] == a[:, 1]).any():
                    raise ParameterError("self loops are not allowed")
                a = np.unique(a, axis=0)
        a.setflags(write=False)
        self.n = n
        self._arcs = a

    @property
    def edges(self) -> np.ndarray:
        return self._arcs

    @property
    def edge_count(self) -> int:
        return int(len(self._arcs))

    def out_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if len(self._arcs):
            deg += np.bincount(self._arcs[:, 0], minlength=self.n)
        return deg

    def in_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        if len(self._arcs):
            deg += np.bincount(self._arcs[:, 1], minlength=self.n)
        return deg

    def undirected_view(self) -> Graph:
        """Underlying undirected graph; opposite arcs merge into one edge."""
        return Graph(self.n, self._arcs)

    def __eq__(self, other):
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._arcs, other._arcs))

    def __repr__(self):
        return f"DiGraph(n={self.n}, arcs={self.edge_count})"


def undirected_view(g) -> Graph:
    """Coerce a Graph or DiGraph to an undirected Graph."""
    if isinstance(g, Graph):
        return g
    if isinstance(g, DiGraph):
        return g.undirected_view()
    raise ParameterError(f"expected Graph or DiGraph, got {type(g).__name__}")


def intersect(a, b) -> Graph:
    """Edge intersection of two graphs on the same vertex set.

    Directed inputs are first collapsed to their undirected views.
    """
    ga = undirected_view(a)
    gb = undirected_view(b)
    if ga.n != gb.n:
        raise ParameterError(f"vertex counts differ: {ga.n} != {gb.n}")
    n = ga.n
    if n == 0 or ga.edge_count == 0 or gb.edge_count == 0:
        return Graph(n)
    ka = ga.edges[:, 0] * n + ga.edges[:, 1]
    kb = gb.edges[:, 0] * n + gb.edges[:, 1]
    kc = np.intersect1d(ka, kb, assume_unique=True)
    return Graph(n, np.column_stack([kc // n, kc % n]))


def _as_point_set(points) -> PointSet:
    return points if isinstance(points, PointSet) else PointSet(points)


# ---------------------------------------------------------------------------
# Gabriel / relative-neighborhood pipeline


class _Grid:
    """Uniform grid over the point bounding box, sized for about one
    point per cell, with a fixed-width slot table for the probe."""

    __slots__ = ("x0", "y0", "s", "nx", "ny", "occ", "slots")

    def __init__(self, P: np.ndarray):
        n = len(P)
        x0 = float(P[:, 0].min())
        y0 = float(P[:, 1].min())
        w = float(P[:, 0].max()) - x0
        h = float(P[:, 1].max()) - y0
        area = w * h
        if area > 0.0:
            s = math.sqrt(area / n)
        else:
            s = max(w, h) / (8.0 * math.sqrt(n) + 1.0)
        if s <= 0.0:
            s = 1.0
        # cap the cell count so the slot table stays small even for thin
        # bounding boxes
        while (int(w / s) + 1) * (int(h / s) + 1) > 8 * n + 64:
            s *= 2.0
        self.x0 = x0
        self.y0 = y0
        self.s = s
        self.nx = int(w / s) + 1
        self.ny = int(h / s) + 1
        cells = self.cell_of(P)
        ncells = self.nx * self.ny
        self.occ = np.bincount(cells, minlength=ncells)
        order = np.argsort(cells, kind="stable")
        sc = cells[order]
        rank = np.arange(n, dtype=np.int64) - np.searchsorted(sc, sc, side="left")
        slots = np.full((ncells, _PAD), -1, dtype=np.int32)
        keep = rank < _PAD
        slots[sc[keep], rank[keep]] = order[keep]
        self.slots = slots

    def cell_xy(self, pts: np.ndarray):
        cx = ((pts[:, 0] - self.x0) / self.s).astype(np.int64)
        cy = ((pts[:, 1] - self.y0) / self.s).astype(np.int64)
        np.clip(cx, 0, self.nx - 1, out=cx)
        np.clip(cy, 0, self.ny - 1, out=cy)
        return cx, cy

    def cell_of(self, pts: np.ndarray) -> np.ndarray:
        cx, cy = self.cell_xy(pts)
        return cx * self.ny + cy


def _probe_chunk(P, grid, u, v, kind):
    """Classify candidate pairs against the 3x3 cell block around each
    midpoint. Returns (edge, dead) masks; pairs with neither set still
    need the full emptiness test."""
    m = len(u)
    Pu = P[u]
    Pv = P[v]
    mx = (Pu[:, 0] + Pv[:, 0]) / 2.0
    my = (Pu[:, 1] + Pv[:, 1]) / 2.0
    dx = Pv[:, 0] - Pu[:, 0]
    dy = Pv[:, 1] - Pu[:, 1]
    duv2 = dx * dx + dy * dy
    s = grid.s
    if kind == GABRIEL:
        # open disk of radius d/2 around the midpoint fits in the block
        short = duv2 < 4.0 * s * s
    else:
        # open lune fits in a square of half-side sqrt(3)/2 * d
        short = duv2 < (4.0 / 3.0) * s * s
    cx = np.clip(((mx - grid.x0) / s).astype(np.int64), 0, grid.nx - 1)
    cy = np.clip(((my - grid.y0) / s).astype(np.int64), 0, grid.ny - 1)

    alive = np.arange(m, dtype=np.int64)
    dead = np.zeros(m, dtype=bool)
    clean = np.ones(m, dtype=bool)
    for ox, oy in _NEIGHBOR_OFFSETS:
        if len(alive) == 0:
            break
        ax = cx[alive] + ox
        ay = cy[alive] + oy
        inb = (ax >= 0) & (ax < grid.nx) & (ay >= 0) & (ay < grid.ny)
        if inb.any():
            sub = alive[inb]
            cid = ax[inb] * grid.ny + ay[inb]
            clean[sub] &= grid.occ[cid] <= _PAD
            kill = np.zeros(len(sub), dtype=bool)
            if kind == GABRIEL:
                smx = mx[sub]
                smy = my[sub]
                sd2q = duv2[sub] / 4.0
            else:
                sux = Pu[sub, 0]
                suy = Pu[sub, 1]
                svx = Pv[sub, 0]
                svy = Pv[sub, 1]
                sd2 = duv2[sub]
            su = u[sub]
            sv = v[sub]
            for sl in range(_PAD):
                w = grid.slots[cid, sl].astype(np.int64)
                has = w >= 0
                if not has.any():
                    break
                wi = np.where(has, w, 0)
                wx = P[wi, 0]
                wy = P[wi, 1]
                if kind == GABRIEL:
                    ddx = wx - smx
                    ddy = wy - smy
                    inside = ddx * ddx + ddy * ddy < sd2q
                else:
                    dux = wx - sux
                    duy = wy - suy
                    dvx = wx - svx
                    dvy = wy - svy
                    inside = (dux * dux + duy * duy < sd2) & (dvx * dvx + dvy * dvy < sd2)
                inside &= has & (w != su) & (w != sv)
                kill |= inside
            if kill.any():
                dead[sub[kill]] = True
        alive = alive[~dead[alive]]
    edge = short & clean & ~dead
    return edge, dead


def _full_test(P, tree, u, v, kind):
    """Exact emptiness test for candidate pairs: fetch every point that
    could sit in the region with a covering ball query, then apply the
    open predicate. Returns a keep mask."""
    m = len(u)
    out = np.zeros(m, dtype=bool)
    B = 32768
    for lo in range(0, m, B):
        uu = u[lo:lo + B]
        vv = v[lo:lo + B]
        mb = len(uu)
        Pu = P[uu]
        Pv = P[vv]
        mid = (Pu + Pv) / 2.0
        dx = Pv[:, 0] - Pu[:, 0]
        dy = Pv[:, 1] - Pu[:, 1]
        duv2 = dx * dx + dy * dy
        d = np.sqrt(duv2)
        if kind == GABRIEL:
            r = 0.5 * d * (1.0 + 1e-9)
        else:
            r = (math.sqrt(3.0) / 2.0) * d * (1.0 + 1e-9)
        lists = tree.query_ball_point(mid, r)
        cnt = np.fromiter(map(len, lists), dtype=np.int64, count=len(lists))
        total = int(cnt.sum())
        bad = np.zeros(mb, dtype=bool)
        if total:
            rep = np.repeat(np.arange(mb, dtype=np.int64), cnt)
            wit = np.fromiter(chain.from_iterable(lists), dtype=np.int64, count=total)
            keep = (wit != uu[rep]) & (wit != vv[rep])
            wit = wit[keep]
            rp = rep[keep]
            if len(wit):
                wx = P[wit, 0]
                wy = P[wit, 1]
                if kind == GABRIEL:
                    ddx = wx - mid[rp, 0]
                    ddy = wy - mid[rp, 1]
                    inside = ddx * ddx + ddy * ddy < duv2[rp] / 4.0
                else:
                    dux = wx - Pu[rp, 0]
                    duy = wy - Pu[rp, 1]
                    dvx = wx - Pv[rp, 0]
                    dvy = wy - Pv[rp, 1]
                    inside = (dux * dux + duy * duy < duv2[rp]) & (
                        dvx * dvx + dvy * dvy < duv2[rp]
                    )
                if inside.any():
                    bad = np.bincount(rp[inside], minlength=mb) > 0
        out[lo:lo + mb] = ~bad
    return out


def _near_hull_mask(P, centers, margin):
    """Mask of centers within margin of the convex hull of P. Midpoints
    of point pairs lie inside the hull, so cells further out cannot hold
    an edge midpoint."""
    try:
        hull = ConvexHull(P)
    except QhullError:
        return np.ones(len(centers), dtype=bool)
    eq = hull.equations
    val = centers @ eq[:, :2].T + eq[:, 2]
    return (val <= margin).all(axis=1)


def _void_edges(P, grid, tree, r_w, kind):
    """Recover edges longer than the candidate window.

    For an edge of length d > r_w the grid cell holding its midpoint is
    empty and the cell center has nearest-point clearance at least
    d/2 minus the cell half-diagonal. Scanning empty cells above that
    clearance threshold and pairing the points just outside the cleared
    ball therefore finds every long edge."""
    s = grid.s
    empty = np.flatnonzero(grid.occ == 0)
    none = np.empty((0, 2), dtype=np.int64)
    if len(empty) == 0:
        return none
    ecx, ecy = np.divmod(empty, grid.ny)
    centers = np.column_stack([
        grid.x0 + (ecx + 0.5) * s,
        grid.y0 + (ecy + 0.5) * s,
    ])
    near = _near_hull_mask(P, centers, margin=s)
    empty = empty[near]
    centers = centers[near]
    if len(empty) == 0:
        return none
    clr, _ = tree.query(centers, k=1)
    # threshold has 0.04*s of slack under r_w/2 - s*sqrt(2)/2
    void = clr >= 0.5 * r_w - 0.75 * s
    empty = empty[void]
    centers = centers[void]
    clr = clr[void]
    if len(empty) == 0:
        return none
    lim = (r_w * (1.0 - 1e-9)) ** 2
    found = []
    balls = tree.query_ball_point(centers, clr + 2.0 * s)
    for cid, c, members in zip(empty, centers, balls):
        idxs = np.asarray(members, dtype=np.int64)
        M = len(idxs)
        if M < 2:
            continue
        if M <= 1500:
            ii, jj = np.triu_indices(M, k=1)
            a = idxs[ii]
            b = idxs[jj]
        else:
            # pair partners sit near the mirror of each point through the
            # cell; a small ball around each mirror finds them all
            mirror = 2.0 * c - P[idxs]
            cand = tree.query_ball_point(mirror, 1.5 * s)
            pairs = []
            for t, lst in enumerate(cand):
                it = int(idxs[t])
                for q in lst:
                    if q > it:
                        pairs.append((it, q))
                    elif q < it:
                        pairs.append((q, it))
            if not pairs:
                continue
            ab = np.unique(np.asarray(pairs, dtype=np.int64), axis=0)
            a = ab[:, 0]
            b = ab[:, 1]
        Pa = P[a]
        Pb = P[b]
        mid = (Pa + Pb) / 2.0
        dx = Pb[:, 0] - Pa[:, 0]
        dy = Pb[:, 1] - Pa[:, 1]
        duv2 = dx * dx + dy * dy
        keep = (duv2 > lim) & (grid.cell_of(mid) == cid)
        if keep.any():
            found.append(np.column_stack([a[keep], b[keep]]))
    if not found:
        return none
    cand = np.unique(np.concatenate(found, axis=0), axis=0)
    good = _full_test(P, tree, cand[:, 0], cand[:, 1], kind)
    return cand[good]


def _small_exact(P, kind):
    """All-pairs builder for tiny inputs; shares predicate expressions
    with the pipeline."""
    n = len(P)
    dx = P[None, :, 0] - P[:, None, 0]
    dy = P[None, :, 1] - P[:, None, 1]
    d2 = dx * dx + dy * dy
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            d2ij = d2[i, j]
            if kind == GABRIEL:
                mxij = (P[i, 0] + P[j, 0]) / 2.0
                myij = (P[i, 1] + P[j, 1]) / 2.0
                ddx = P[:, 0] - mxij
                ddy = P[:, 1] - myij
                inside = ddx * ddx + ddy * ddy < d2ij / 4.0
            else:
                inside = (d2[i] < d2ij) & (d2[j] < d2ij)
            inside[i] = False
            inside[j] = False
            if not inside.any():
                edges.append((i, j))
    if not edges:
        return np.empty((0, 2), dtype=np.int64)
    return np.asarray(edges, dtype=np.int64)


def _proximity_edges(points: PointSet, kind: str) -> np.ndarray:
    P = points.coords
    n = len(P)
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)
    if n <= 64:
        return _small_exact(P, kind)
    grid = _Grid(P)
    tree = cKDTree(P)
    r_w = 4.0 * grid.s
    pairs = tree.query_pairs(r_w * (1.0 + 1e-12), output_type="ndarray")
    u = pairs[:, 0].astype(np.int64)
    v = pairs[:, 1].astype(np.int64)
    edge_mask = np.zeros(len(u), dtype=bool)
    full_u = []
    full_v = []
    B = 262144
    for lo in range(0, len(u), B):
        uu = u[lo:lo + B]
        vv = v[lo:lo + B]
        e, dead = _probe_chunk(P, grid, uu, vv, kind)
        edge_mask[lo:lo + len(uu)] = e
        nf = ~(e | dead)
        if nf.any():
            full_u.append(uu[nf])
            full_v.append(vv[nf])
    parts = [np.column_stack([u[edge_mask], v[edge_mask]])]
    if full_u:
        fu = np.concatenate(full_u)
        fv = np.concatenate(full_v)
        ok = _full_test(P, tree, fu, fv, kind)
        parts.append(np.column_stack([fu[ok], fv[ok]]))
    parts.append(_void_edges(P, grid, tree, r_w, kind))
    return np.concatenate(parts, axis=0)


def gabriel(points) -> Graph:
    """Gabriel graph: u ~ v iff the open disk with diameter uv contains
    no other point of the set."""
    pts = _as_point_set(points)
    return Graph(pts.n, _proximity_edges(pts, GABRIEL))


def rng_graph(points) -> Graph:
    """Relative-neighborhood graph: u ~ v iff no other point is strictly
    closer to both u and v than they are to each other."""
    pts = _as_point_set(points)
    return Graph(pts.n, _proximity_edges(pts, RNG))


def gabriel_naive(points) -> Graph:
    """Quadratic-scan Gabriel reference; same predicate expressions as
    the fast builder."""
    pts = _as_point_set(points)
    P = pts.coords
    n = len(P)
    edges = []
    for i in range(n - 1):
        V = P[i + 1:]
        mid = (P[i] + V) / 2.0
        rhs = ((V - P[i]) ** 2).sum(axis=1) / 4.0
        ddx = P[None, :, 0] - mid[:, None, 0]
        ddy = P[None, :, 1] - mid[:, None, 1]
        inside = ddx * ddx + ddy * ddy < rhs[:, None]
        inside[:, i] = False
        rows = np.arange(i + 1, n)
        inside[np.arange(len(V)), rows] = False
        for j in rows[~inside.any(axis=1)]:
            edges.append((i, int(j)))
    return Graph(n, np.asarray(edges, dtype=np.int64) if edges else None)


def rng_naive(points) -> Graph:
    """Quadratic-scan relative-neighborhood reference."""
    pts = _as_point_set(points)
    P = pts.coords
    n = len(P)
    dx = P[None, :, 0] - P[:, None, 0]
    dy = P[None, :, 1] - P[:, None, 1]
    d2 = dx * dx + dy * dy
    edges = []
    for i in range(n - 1):
        for j in range(i + 1, n):
            d2ij = d2[i, j]
            inside = (d2[i] < d2ij) & (d2[j] < d2ij)
            inside[i] = False
            inside[j] = False
            if not inside.any():
                edges.append((i, j))
    return Graph(n, np.asarray(edges, dtype=np.int64) if edges else None)


# ---------------------------------------------------------------------------
# Yao graph


def _yao_dense(P, spec: ConeSpec) -> np.ndarray:
    """All-pairs cone scan in row chunks; first minimum per cone, so ties
    go to the smaller index."""
    n = len(P)
    p = spec.p
    theta = spec.theta
    tails = []
    heads = []
    B = 256
    for lo in range(0, n, B):
        hi = min(n, lo + B)
        dx = P[None, :, 0] - P[lo:hi, None, 0]
        dy = P[None, :, 1] - P[lo:hi, None, 1]
        d2 = dx * dx + dy * dy
        a = (np.arctan2(dy, dx) - spec.offset) % TWO_PI
        cidx = np.minimum((a / theta).astype(np.int64) + 1, p)
        rl = np.arange(hi - lo)
        d2[rl, lo + rl] = np.inf
        for c in range(1, p + 1):
            dc = np.where(cidx == c, d2, np.inf)
            j = np.argmin(dc, axis=1)
            hit = np.isfinite(dc[rl, j])
            if hit.any():
                tails.append((lo + rl[hit]).astype(np.int64))
                heads.append(j[hit].astype(np.int64))
    if not tails:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(tails), np.concatenate(heads)])


def _yao_rows_exact(P, spec: ConeSpec, rows, tails, heads):
    """Full linear scan for rows the staged kNN search left unresolved."""
    p = spec.p
    theta = spec.theta
    for r in rows:
        r = int(r)
        dx = P[:, 0] - P[r, 0]
        dy = P[:, 1] - P[r, 1]
        d2 = dx * dx + dy * dy
        a = (np.arctan2(dy, dx) - spec.offset) % TWO_PI
        ci = np.minimum((a / theta).astype(np.int64) + 1, p)
        d2[r] = np.inf
        for c in range(1, p + 1):
            dc = np.where(ci == c, d2, np.inf)
            j = int(np.argmin(dc))
            if np.isfinite(dc[j]):
                tails.append(np.array([r], dtype=np.int64))
                heads.append(np.array([j], dtype=np.int64))


def _yao_resolve(P, spec: ConeSpec, rows, ik, complete, horizon2, tails, heads):
    """Emit arcs for rows whose every cone is settled by the k neighbors
    seen so far. Returns the mask of resolved rows."""
    m, k = ik.shape
    dx = P[ik, 0] - P[rows, 0][:, None]
    dy = P[ik, 1] - P[rows, 1][:, None]
    d2 = dx * dx + dy * dy
    a = (np.arctan2(dy, dx) - spec.offset) % TWO_PI
    cidx = np.minimum((a / spec.theta).astype(np.int64) + 1, spec.p)
    rr = np.repeat(np.arange(m, dtype=np.int64), k)
    order = np.lexsort((ik.ravel(), d2.ravel(), rr))
    d2s = d2.ravel()[order].reshape(m, k)
    iks = ik.ravel()[order].reshape(m, k)
    cis = cidx.ravel()[order].reshape(m, k)
    ridx = np.arange(m)
    resolved = np.ones(m, dtype=bool)
    win = np.full((m, spec.p), -1, dtype=np.int64)
    for c in range(1, spec.p + 1):
        mask = cis == c
        any_ = mask.any(axis=1)
        first = np.argmax(mask, axis=1)
        wd2 = np.where(any_, d2s[ridx, first], np.inf)
        wh = np.where(any_, iks[ridx, first], -1)
        # a winner strictly inside the search horizon cannot be displaced
        # by unseen points; an empty cone is conclusive only on a
        # complete scan
        cone_ok = np.where(any_, wd2 < horizon2, complete)
        resolved &= cone_ok
        win[:, c - 1] = wh
    for c in range(spec.p):
        has = resolved & (win[:, c] >= 0)
        if has.any():
            tails.append(rows[has])
            heads.append(win[has, c])
    return resolved


def _yao_knn(P, spec: ConeSpec) -> np.ndarray:
    """Staged nearest-neighbor search: most rows settle with a small k,
    stragglers escalate once, leftovers get an exact scan."""
    n = len(P)
    tree = cKDTree(P)
    pending = np.arange(n, dtype=np.int64)
    k = min(n - 1, 16 + spec.p)
    tails = []
    heads = []
    for stage in range(2):
        if len(pending) == 0:
            break
        dk, ik = tree.query(P[pending], k=k + 1)
        notself = ik != pending[:, None]
        # the self column is the unique zero-distance entry; drop it and,
        # when a row somehow lacks it, drop that row's last column
        extra = notself.sum(axis=1) - k
        if (extra > 0).any():
            fix = np.flatnonzero(extra > 0)
            notself[fix, -1] = False
        ik2 = ik[notself].reshape(len(pending), k)
        complete = k >= n - 1
        if complete:
            horizon2 = np.full(len(pending), np.inf)
        else:
            b = dk.max(axis=1) * (1.0 - 1e-12)
            horizon2 = b * b
        resolved = _yao_resolve(
            P, spec, pending, ik2, complete, horizon2, tails, heads
        )
        pending = pending[~resolved]
        if complete:
            pending = pending[:0]
            break
        k = min(n - 1, k * 8)
    if len(pending):
        _yao_rows_exact(P, spec, pending, tails, heads)
    if not tails:
        return np.empty((0, 2), dtype=np.int64)
    return np.column_stack([np.concatenate(tails), np.concatenate(heads)])


def yao(points, spec: ConeSpec) -> DiGraph:
    """Directed Yao graph for the given cone partition: each point sends
    one arc to its nearest neighbor inside each cone, ties broken toward
    the smaller point index."""
    pts = _as_point_set(points)
    if not isinstance(spec, ConeSpec):
        raise ParameterError(f"expected ConeSpec, got {type(spec).__name__}")
    n = pts.n
    if n < 2:
        return DiGraph(n)
    if n <= 2048:
        arcs = _yao_dense(pts.coords, spec)
    else:
        arcs = _yao_knn(pts.coords, spec)
    return DiGraph(n, arcs)


def unit_disk_graph(points, radius) -> Graph:
    """u ~ v iff dist(u, v) <= radius, boundary included."""
    pts = _as_point_set(points)
    if not isinstance(radius, (int, float)) or isinstance(radius, bool):
        raise ParameterError(f"radius must be a number, got {radius!r}")
    radius = float(radius)
    if not (math.isfinite(radius) and radius > 0.0):
        raise ParameterError(f"radius must be positive and finite, got {radius!r}")
    tree = cKDTree(pts.coords)
    pairs = tree.query_pairs(radius * (1.0 + 1e-12), output_type="ndarray")
    if len(pairs):
        P = pts.coords
        d = np.hypot(
            P[pairs[:, 1], 0] - P[pairs[:, 0], 0],
            P[pairs[:, 1], 1] - P[pairs[:, 0], 1],
        )
        pairs = pairs[d <= radius]
    return Graph(pts.n, pairs)
