"""Windowed models of proper metric spaces.

Every model fixes a finite window around a distinguished basepoint and
offers exact distances, deterministic point enumeration, and neighbor
queries at a given scale.  All models are immutable after construction;
derived data (point lists, distance matrices, neighbor pair lists) is
cached on first use.

``window_radius`` is the inscribed-ball radius: every point of the
underlying infinite space within that distance of the basepoint lies in
the window.  Boundedness and cocontrolledness verdicts measure their
safety margins against it.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial import cKDTree

WINDOW_CAP = 10 ** 7
MATRIX_CAP = 6000


class WindowTooLargeError(ValueError):
    pass


class PointOutsideWindowError(ValueError):
    pass


class Space:
    """Common behaviour for all windowed space models."""

    kind = "abstract"

    def __init__(self):
        self._points = None
        self._index = None
        self._base_dist = None
        self._matrix = None
        self._pair_cache = {}

    # subclasses implement: _enumerate(), distance(p, q), basepoint,
    # window_radius, key

    def size_estimate(self):
        """Window point count without materializing the window."""
        return len(self.points())

    def points(self):
        if self._points is None:
            pts = self._enumerate()
            if len(pts) > WINDOW_CAP:
                raise WindowTooLargeError(f"{len(pts)} points exceeds cap {WINDOW_CAP}")
            self._points = pts
        return self._points

    def point_index(self):
        if self._index is None:
            self._index = {p: i for i, p in enumerate(self.points())}
        return self._index

    def __len__(self):
        return len(self.points())

    def contains_point(self, p):
        return p in self.point_index()

    def require_point(self, p):
        if not self.contains_point(p):
            raise PointOutsideWindowError(f"{p!r} not in window of {self.key}")

    def base_distances(self):
        """Vector of distances from every window point to the basepoint."""
        if self._base_dist is None:
            base = self.basepoint
            self._base_dist = np.array(
                [self.distance(base, p) for p in self.points()], dtype=np.int64
            )
        return self._base_dist

    def distance_matrix(self):
        n = len(self.points())
        if n > MATRIX_CAP:
            raise WindowTooLargeError(
                f"distance matrix for {n} points exceeds cap {MATRIX_CAP}"
            )
        if self._matrix is None:
            self._matrix = self._build_matrix()
        return self._matrix

    def _build_matrix(self):
        pts = self.points()
        n = len(pts)
        m = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                d = self.distance(pts[i], pts[j])
                m[i, j] = d
                m[j, i] = d
        return m

    def pairs_within(self, scale):
        """Index pairs ``(i, j)``, ``i < j``, of window points at distance <= scale."""
        if scale not in self._pair_cache:
            self._pair_cache[scale] = self._pairs_within(scale)
        return self._pair_cache[scale]

    def _pairs_within(self, scale):
        m = self.distance_matrix()
        i, j = np.nonzero(np.triu(m <= scale, k=1))
        return np.stack([i, j], axis=1)

    def ball(self, center, radius):
        """Window points at distance <= radius from center, in window order."""
        self.require_point(center)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        return [p for p in self.points() if self.distance(center, p) <= radius]

    def enumerate_window(self):
        return list(self.points())


class LatticeBox(Space):
    """``Z^n`` windowed to the box ``[-N, N]^n``, with the L1 or Linf metric."""

    kind = "lattice"

    def __init__(self, dim, radius, metric="l1"):
        super().__init__()
        if dim < 1 or radius < 1:
            raise ValueError("need dim >= 1 and radius >= 1")
        if metric not in ("l1", "linf"):
            raise ValueError(f"unknown metric {metric!r}")
        self.dim = dim
        self.radius = radius
        self.metric = metric
        self.basepoint = (0,) * dim
        self.window_radius = radius
        self.key = ("lattice", dim, radius, metric)

    def size_estimate(self):
        return (2 * self.radius + 1) ** self.dim

    def _enumerate(self):
        rng = range(-self.radius, self.radius + 1)
        return [tuple(p) for p in itertools.product(rng, repeat=self.dim)]

    def distance(self, p, q):
        if self.metric == "l1":
            return sum(abs(a - b) for a, b in zip(p, q))
        return max(abs(a - b) for a, b in zip(p, q))

    def coords(self):
        return np.array(self.points(), dtype=np.int64)

    def _pairs_within(self, scale):
        tree = cKDTree(self.coords())
        p = 1 if self.metric == "l1" else np.inf
        pairs = tree.query_pairs(scale, p=p, output_type="ndarray")
        return pairs

    def ball(self, center, radius):
        self.require_point(center)
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        out = []
        for p in self.points():  # window order keeps output deterministic
            if self.distance(center, p) <= radius:
                out.append(p)
        return out


class RootedTree(Space):
    """A rooted tree with unit edge lengths, windowed to a fixed depth.

    ``branching`` is a constant degree or a per-level list; points are
    root paths (tuples of child indices), enumerated in breadth-first
    order.  A branching degree of 1 gives the half-line.
    """

    kind = "tree"

    def __init__(self, branching, depth):
        super().__init__()
        if depth < 1:
            raise ValueError("depth must be >= 1")
        if isinstance(branching, int):
            branching = [branching] * depth
        if len(branching) != depth or any(b < 1 for b in branching):
            raise ValueError("branching must list a positive degree per level")
        self.branching = tuple(branching)
        self.depth = depth
        self.basepoint = ()
        self.window_radius = depth
        self.key = ("tree", self.branching, depth)

    def _enumerate(self):
        levels = [[()]]
        for level in range(self.depth):
            b = self.branching[level]
            levels.append([p + (c,) for p in levels[-1] for c in range(b)])
        return [p for level in levels for p in level]

    def distance(self, p, q):
        k = 0
        for a, b in zip(p, q):
            if a != b:
                break
            k += 1
        return (len(p) - k) + (len(q) - k)

    def children(self, p):
        if len(p) >= self.depth:
            return []
        return [p + (c,) for c in range(self.branching[len(p)])]

    def parent(self, p):
        return p[:-1] if p else None

    def _pairs_within(self, scale):
        index = self.point_index()
        pairs = []
        for p in self.points():
            i = index[p]
            for q in self._ball_bfs(p, scale):
                j = index[q]
                if i < j:
                    pairs.append((i, j))
        return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)

    def _ball_bfs(self, p, radius):
        seen = {p: 0}
        frontier = [p]
        for _ in range(radius):
            nxt = []
            for q in frontier:
                neighbors = self.children(q)
                parent = self.parent(q)
                if parent is not None:
                    neighbors = neighbors + [parent]
                for r in neighbors:
                    if r not in seen:
                        seen[r] = seen[q] + 1
                        nxt.append(r)
            frontier = nxt
        return list(seen)

    def ball(self, center, radius):
        self.require_point(center)
        members = set(self._ball_bfs(center, radius))
        return [p for p in self.points() if p in members]

    def _build_matrix(self):
        pts = self.points()
        n = len(pts)
        depth = np.array([len(p) for p in pts], dtype=np.int64)
        padded = np.full((n, self.depth), -1, dtype=np.int64)
        for i, p in enumerate(pts):
            padded[i, : len(p)] = p
        m = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            eq = (padded == padded[i]) & (padded[i] >= 0)
            common = np.cumprod(eq, axis=1).sum(axis=1)
            m[i] = depth + depth[i] - 2 * common
        return m


class ExplicitFinite(Space):
    """A finite metric space given by a symmetric distance matrix."""

    kind = "explicit"

    def __init__(self, matrix):
        super().__init__()
        n = len(matrix)
        for i in range(n):
            if len(matrix[i]) != n:
                raise ValueError("distance matrix must be square")
            if matrix[i][i] != 0:
                raise ValueError("diagonal must vanish")
            for j in range(n):
                if matrix[i][j] != matrix[j][i]:
                    raise ValueError("distance matrix must be symmetric")
                if matrix[i][j] < 0:
                    raise ValueError("distances must be nonnegative")
                if i != j and matrix[i][j] == 0:
                    raise ValueError("distance zero off the diagonal")
        if n <= 64:
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if matrix[i][k] > matrix[i][j] + matrix[j][k]:
                            raise ValueError("triangle inequality violated")
        self.matrix = [list(row) for row in matrix]
        self.basepoint = 0
        self.window_radius = max(matrix[0]) if n > 1 else 1
        self.key = ("explicit", tuple(tuple(row) for row in self.matrix))

    def _enumerate(self):
        return list(range(len(self.matrix)))

    def distance(self, p, q):
        return self.matrix[p][q]

    def _build_matrix(self):
        return np.array(self.matrix, dtype=np.int64)


class Subspace(Space):
    """A subset of an ambient model with the inherited metric.

    The expression is evaluated once over the ambient window.  The
    basepoint is the member closest to the ambient basepoint (ties broken
    by window order).
    """

    kind = "subspace"

    def __init__(self, ambient, expr):
        super().__init__()
        from .subsets import membership_mask  # local import to avoid a cycle

        self.ambient = ambient
        self.expr = expr
        mask = membership_mask(expr, ambient)
        pts = [p for p, m in zip(ambient.points(), mask) if m]
        if not pts:
            raise ValueError("subspace is empty on the window")
        self._points = pts
        dist = [ambient.distance(ambient.basepoint, p) for p in pts]
        best = min(range(len(pts)), key=lambda i: (dist[i], i))
        self.basepoint = pts[best]
        self.window_radius = ambient.window_radius - dist[best]
        if self.window_radius < 1:
            raise ValueError("subspace basepoint too close to the window edge")
        self.key = ("subspace", ambient.key, expr.key())

    def _enumerate(self):
        return self._points

    def distance(self, p, q):
        return self.ambient.distance(p, q)

    def _pairs_within(self, scale):
        amb_pairs = self.ambient.pairs_within(scale)
        index = self.point_index()
        amb_points = self.ambient.points()
        pairs = []
        for i, j in amb_pairs:
            a = amb_points[i]
            b = amb_points[j]
            ia = index.get(a)
            ib = index.get(b)
            if ia is not None and ib is not None:
                pairs.append((min(ia, ib), max(ia, ib)))
        return np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)


class AsymptoticProduct(Space):
    """Pairs ``(x, (s, t))`` with ``s + t = d(x, basepoint)`` exactly.

    The metric is the base distance plus the Manhattan distance on the
    ``(s, t)`` part.  Requires integer base distances.
    """

    kind = "asymptotic-product"

    def __init__(self, base):
        super().__init__()
        self.base = base
        self.basepoint = (base.basepoint, (0, 0))
        self.window_radius = 2 * base.window_radius
        self.key = ("asymptotic-product", base.key)

    def _enumerate(self):
        out = []
        for x, r in zip(self.base.points(), self.base.base_distances()):
            r = int(r)
            for s in range(r + 1):
                out.append((x, (s, r - s)))
        return out

    def distance(self, p, q):
        (x, (s1, t1)) = p
        (y, (s2, t2)) = q
        return self.base.distance(x, y) + abs(s2 - s1) + abs(t2 - t1)


class ProductWithRay(Space):
    """Base model times ``Z>=0`` (windowed to ``[0, extent]``), L1 combination."""

    kind = "product-ray"

    def __init__(self, base, extent):
        super().__init__()
        if extent < 1:
            raise ValueError("extent must be >= 1")
        self.base = base
        self.extent = extent
        self.basepoint = (base.basepoint, 0)
        self.window_radius = min(base.window_radius, extent)
        self.key = ("product-ray", base.key, extent)

    def _enumerate(self):
        return [(x, k) for x in self.base.points() for k in range(self.extent + 1)]

    def distance(self, p, q):
        return self.base.distance(p[0], q[0]) + abs(p[1] - q[1])


class ProductWithLine(Space):
    """Base model times ``Z`` (windowed to ``[-extent, extent]``), L1 combination."""

    kind = "product-line"

    def __init__(self, base, extent):
        super().__init__()
        if extent < 1:
            raise ValueError("extent must be >= 1")
        self.base = base
        self.extent = extent
        self.basepoint = (base.basepoint, 0)
        self.window_radius = min(base.window_radius, extent)
        self.key = ("product-line", base.key, extent)

    def _enumerate(self):
        rng = range(-self.extent, self.extent + 1)
        return [(x, k) for x in self.base.points() for k in rng]

    def distance(self, p, q):
        return self.base.distance(p[0], q[0]) + abs(p[1] - q[1])


def lattice_line(radius):
    """The windowed model of Z."""
    return LatticeBox(1, radius)


def half_line(radius):
    """The windowed model of Z>=0 as a degenerate rooted tree."""
    return RootedTree(1, radius)


def binary_tree(depth):
    return RootedTree(2, depth)
