"""Symbolic subset algebra with exact membership and boundedness verdicts.

Expressions are built from the atoms ``All``, ``Empty``, ``HalfSpace``,
``Quadrant``, ``Cone``, ``Ball``, ``FinitePointSet`` and ``TreePrefix``,
closed under complement, union, intersection and R-thickening.  Every
expression has a canonical textual form used in config files and a
structural key used for caching.

Two evaluation routes exist.  The scan route computes an exact membership
mask over the window.  The box route represents an expression, when
possible, as a finite union of axis-aligned boxes on a lattice; verdicts
derived from boxes are exact statements about the infinite space and are
cross-checked against window scans in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import LatticeBox, RootedTree, Subspace
from .sweeps import BOUNDED, INCONCLUSIVE, UNBOUNDED, BoundednessCertificate, Sweep

_MASK_CACHE = {}
_BOX_CACHE = {}


class SubsetExpr:
    def key(self):
        raise NotImplementedError

    def to_text(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, SubsetExpr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return self.to_text()

    def __and__(self, other):
        return Intersection([self, other])

    def __or__(self, other):
        return Union([self, other])

    def __invert__(self):
        return Complement(self)


class All(SubsetExpr):
    def key(self):
        return ("all",)

    def to_text(self):
        return "all"


class Empty(SubsetExpr):
    def key(self):
        return ("empty",)

    def to_text(self):
        return "empty"


class HalfSpace(SubsetExpr):
    """``x[axis] >= offset`` for sign '+', ``x[axis] < offset`` for sign '-'."""

    def __init__(self, axis, sign, offset=0):
        if sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        self.axis = axis
        self.sign = sign
        self.offset = offset

    def key(self):
        return ("halfspace", self.axis, self.sign, self.offset)

    def to_text(self):
        if self.offset:
            return f"halfspace(axis={self.axis},sign={self.sign},offset={self.offset})"
        return f"halfspace(axis={self.axis},sign={self.sign})"


class Quadrant(SubsetExpr):
    """Sign-vector orthant; '+' means coordinate >= 0, '-' means < 0, '*' free."""

    def __init__(self, signs):
        signs = tuple(signs)
        if any(s not in "+-*" for s in signs):
            raise ValueError("signs must be '+', '-' or '*'")
        self.signs = signs

    def key(self):
        return ("quadrant", self.signs)

    def to_text(self):
        return "quadrant(%s)" % ",".join(self.signs)


class Cone(SubsetExpr):
    """Comparison of coordinate magnitudes, e.g. ``|x_left| <= |x_right|``."""

    def __init__(self, op, left_axis, right_axis):
        if op not in ("le", "lt", "ge", "gt"):
            raise ValueError("op must be one of le, lt, ge, gt")
        self.op = op
        self.left_axis = left_axis
        self.right_axis = right_axis

    def key(self):
        return ("cone", self.op, self.left_axis, self.right_axis)

    def to_text(self):
        return f"cone({self.op},|x{self.left_axis}|,|x{self.right_axis}|)"


class Ball(SubsetExpr):
    def __init__(self, center, radius):
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        self.center = tuple(center) if isinstance(center, (list, tuple)) else center
        self.radius = radius

    def key(self):
        return ("ball", self.center, self.radius)

    def to_text(self):
        return f"ball({_point_text(self.center)},{self.radius})"


class FinitePointSet(SubsetExpr):
    def __init__(self, points):
        self.members = tuple(
            tuple(p) if isinstance(p, (list, tuple)) else p for p in points
        )

    def key(self):
        return ("points", self.members)

    def to_text(self):
        return "points(%s)" % ",".join(_point_text(p) for p in self.members)


class TreePrefix(SubsetExpr):
    """A vertex of a rooted tree together with all of its descendants."""

    def __init__(self, vertex):
        self.vertex = tuple(vertex)

    def key(self):
        return ("treeprefix", self.vertex)

    def to_text(self):
        return "treeprefix(%s)" % _point_text(self.vertex)


class Complement(SubsetExpr):
    def __init__(self, inner):
        self.inner = inner

    def key(self):
        return ("not", self.inner.key())

    def to_text(self):
        return f"not({self.inner.to_text()})"


class Union(SubsetExpr):
    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ValueError("union needs at least one part")

    def key(self):
        return ("or",) + tuple(p.key() for p in self.parts)

    def to_text(self):
        return "or(%s)" % ",".join(p.to_text() for p in self.parts)


class Intersection(SubsetExpr):
    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ValueError("intersection needs at least one part")

    def key(self):
        return ("and",) + tuple(p.key() for p in self.parts)

    def to_text(self):
        return "and(%s)" % ",".join(p.to_text() for p in self.parts)


class Thicken(SubsetExpr):
    """All points within distance R of the inner set."""

    def __init__(self, inner, scale):
        if scale < 0:
            raise ValueError("scale must be nonnegative")
        self.inner = inner
        self.scale = scale

    def key(self):
        return ("thicken", self.inner.key(), self.scale)

    def to_text(self):
        return f"thicken({self.inner.to_text()},{self.scale})"


def _point_text(p):
    if isinstance(p, tuple):
        return "(%s)" % " ".join(str(x) for x in p)
    return str(p)


# ---------------------------------------------------------------------------
# membership masks


def membership_mask(expr, space):
    """Exact boolean membership over the window, cached per (expr, space)."""
    cache_key = (expr.key(), space.key)
    cached = _MASK_CACHE.get(cache_key)
    if cached is not None:
        return cached
    mask = _compute_mask(expr, space)
    _MASK_CACHE[cache_key] = mask
    return mask


def contains(expr, p, space):
    """Exact membership of a single window point."""
    space.require_point(p)
    return bool(membership_mask(expr, space)[space.point_index()[p]])


def member_points(expr, space):
    mask = membership_mask(expr, space)
    return [p for p, m in zip(space.points(), mask) if m]


def _coords_array(space):
    if isinstance(space, LatticeBox):
        return space.coords()
    pts = space.points()
    if (
        pts
        and isinstance(pts[0], tuple)
        and all(isinstance(x, int) for x in pts[0])
        and len({len(p) for p in pts}) == 1
    ):
        return np.array(pts, dtype=np.int64)
    return None


def _compute_mask(expr, space):
    n = len(space.points())
    if isinstance(expr, All):
        return np.ones(n, dtype=bool)
    if isinstance(expr, Empty):
        return np.zeros(n, dtype=bool)
    if isinstance(expr, Complement):
        return ~membership_mask(expr.inner, space)
    if isinstance(expr, Union):
        mask = np.zeros(n, dtype=bool)
        for part in expr.parts:
            mask |= membership_mask(part, space)
        return mask
    if isinstance(expr, Intersection):
        mask = np.ones(n, dtype=bool)
        for part in expr.parts:
            mask &= membership_mask(part, space)
        return mask
    if isinstance(expr, Thicken):
        return _thicken_mask(membership_mask(expr.inner, space), expr.scale, space)

    if isinstance(expr, Ball):
        space.require_point(expr.center)
        return np.array(
            [space.distance(expr.center, p) <= expr.radius for p in space.points()],
            dtype=bool,
        )
    if isinstance(expr, FinitePointSet):
        members = set(expr.members)
        return np.array([p in members for p in space.points()], dtype=bool)
    if isinstance(expr, TreePrefix):
        if not isinstance(space, RootedTree):
            raise ValueError("treeprefix atoms need a rooted tree")
        v = expr.vertex
        k = len(v)
        return np.array([p[:k] == v for p in space.points()], dtype=bool)

    coords = _coords_array(space)
    if isinstance(expr, HalfSpace):
        if coords is None:
            raise ValueError("halfspace atoms need coordinate points")
        col = coords[:, expr.axis]
        return col >= expr.offset if expr.sign == "+" else col < expr.offset
    if isinstance(expr, Quadrant):
        if coords is None:
            raise ValueError("quadrant atoms need coordinate points")
        mask = np.ones(n, dtype=bool)
        for axis, s in enumerate(expr.signs):
            if s == "+":
                mask &= coords[:, axis] >= 0
            elif s == "-":
                mask &= coords[:, axis] < 0
        return mask
    if isinstance(expr, Cone):
        if coords is None:
            raise ValueError("cone atoms need coordinate points")
        left = np.abs(coords[:, expr.left_axis])
        right = np.abs(coords[:, expr.right_axis])
        return {"le": left <= right, "lt": left < right,
                "ge": left >= right, "gt": left > right}[expr.op]
    raise TypeError(f"unknown expression {expr!r}")


def _thicken_mask(mask, scale, space):
    if scale == 0:
        return mask.copy()
    if isinstance(space, LatticeBox):
        return _lattice_dilate(mask, scale, space)
    out = mask.copy()
    for i, j in space.pairs_within(scale):
        if mask[i]:
            out[j] = True
        if mask[j]:
            out[i] = True
    return out


def _lattice_dilate(mask, scale, space):
    """Exact dilation on the lattice grid by shifting over ball offsets."""
    side = 2 * space.radius + 1
    grid = mask.reshape((side,) * space.dim)
    out = grid.copy()
    for offset in _ball_offsets(space.dim, scale, space.metric):
        if all(o == 0 for o in offset):
            continue
        shifted = grid
        for axis, o in enumerate(offset):
            shifted = _shift(shifted, o, axis)
        out |= shifted
    return out.reshape(-1)


def _ball_offsets(dim, scale, metric):
    from itertools import product

    for offset in product(range(-scale, scale + 1), repeat=dim):
        size = sum(abs(o) for o in offset) if metric == "l1" else max(
            abs(o) for o in offset
        )
        if size <= scale:
            yield offset


def _shift(grid, offset, axis):
    """Shift with zero fill; a point sees neighbors displaced by -offset."""
    if offset == 0:
        return grid
    out = np.zeros_like(grid)
    src = [slice(None)] * grid.ndim
    dst = [slice(None)] * grid.ndim
    if offset > 0:
        src[axis] = slice(offset, None)
        dst[axis] = slice(None, -offset)
    else:
        src[axis] = slice(None, offset)
        dst[axis] = slice(-offset, None)
    out[tuple(dst)] = grid[tuple(src)]
    return out


# ---------------------------------------------------------------------------
# box normal form (exact on lattices, None when not representable)

UNBOUNDED_BELOW = None
BOX_LIST_CAP = 256


def boxes(expr, space):
    """Represent the expression as a finite union of boxes, or None.

    A box is a tuple of per-axis ``(lo, hi)`` pairs, ``None`` marking an
    unbounded side.  Box lists describe the expression on the *infinite*
    lattice, so verdicts read off them are window-independent.  Only
    combinations that stay exact are converted; in particular L1
    thickening is converted only for boxes constrained on at most one
    axis, where inflation is exact.
    """
    if not isinstance(space, (LatticeBox,)):
        return None
    cache_key = (expr.key(), space.key)
    if cache_key in _BOX_CACHE:
        return _BOX_CACHE[cache_key]
    result = _compute_boxes(expr, space)
    if result is not None and len(result) > BOX_LIST_CAP:
        result = None
    _BOX_CACHE[cache_key] = result
    return result


def _full_box(dim):
    return tuple((None, None) for _ in range(dim))


def _compute_boxes(expr, space):
    dim = space.dim
    if isinstance(expr, All):
        return [_full_box(dim)]
    if isinstance(expr, Empty):
        return []
    if isinstance(expr, HalfSpace):
        box = list(_full_box(dim))
        if expr.sign == "+":
            box[expr.axis] = (expr.offset, None)
        else:
            box[expr.axis] = (None, expr.offset - 1)
        return [tuple(box)]
    if isinstance(expr, Quadrant):
        if len(expr.signs) != dim:
            raise ValueError("quadrant sign vector length must match dimension")
        box = []
        for s in expr.signs:
            if s == "+":
                box.append((0, None))
            elif s == "-":
                box.append((None, -1))
            else:
                box.append((None, None))
        return [tuple(box)]
    if isinstance(expr, Ball):
        if space.metric == "linf":
            return [tuple((c - expr.radius, c + expr.radius) for c in expr.center)]
        if space.dim == 1:
            c = expr.center[0]
            return [((c - expr.radius, c + expr.radius),)]
        return None
    if isinstance(expr, FinitePointSet):
        return [tuple((c, c) for c in p) for p in expr.members]
    if isinstance(expr, Union):
        out = []
        for part in expr.parts:
            sub = _compute_boxes(part, space)
            if sub is None:
                return None
            out.extend(sub)
        return _prune(out)
    if isinstance(expr, Intersection):
        current = [_full_box(dim)]
        for part in expr.parts:
            sub = _compute_boxes(part, space)
            if sub is None:
                return None
            current = _prune(
                [b for a in current for b in (_box_meet(a, c) for c in sub) if b]
            )
            if len(current) > BOX_LIST_CAP:
                return None
        return current
    if isinstance(expr, Complement):
        sub = _compute_boxes(expr.inner, space)
        if sub is None:
            return None
        current = [_full_box(dim)]
        for box in sub:
            pieces = _box_complement(box, dim)
            current = _prune(
                [b for a in current for b in (_box_meet(a, c) for c in pieces) if b]
            )
            if len(current) > BOX_LIST_CAP:
                return None
        return current
    if isinstance(expr, Thicken):
        sub = _compute_boxes(expr.inner, space)
        if sub is None:
            return None
        out = []
        for box in sub:
            constrained = sum(1 for lo, hi in box if lo is not None or hi is not None)
            if space.metric == "l1" and constrained > 1:
                return None  # L1 thickening of a corner is not a box
            out.append(
                tuple(
                    (None if lo is None else lo - expr.scale,
                     None if hi is None else hi + expr.scale)
                    for lo, hi in box
                )
            )
        return _prune(out)
    return None


def _box_meet(a, b):
    out = []
    for (lo1, hi1), (lo2, hi2) in zip(a, b):
        lo = lo1 if lo2 is None else (lo2 if lo1 is None else max(lo1, lo2))
        hi = hi1 if hi2 is None else (hi2 if hi1 is None else min(hi1, hi2))
        if lo is not None and hi is not None and lo > hi:
            return None
        out.append((lo, hi))
    return tuple(out)


def _box_complement(box, dim):
    """Complement of a box as a union of at most 2*dim boxes."""
    pieces = []
    for axis, (lo, hi) in enumerate(box):
        if lo is not None:
            piece = list(_full_box(dim))
            piece[axis] = (None, lo - 1)
            pieces.append(tuple(piece))
        if hi is not None:
            piece = list(_full_box(dim))
            piece[axis] = (hi + 1, None)
            pieces.append(tuple(piece))
    if not pieces:
        return []
    # make the pieces disjoint is unnecessary for our verdicts; keep the cover
    return pieces


def _box_subset(a, b):
    for (lo1, hi1), (lo2, hi2) in zip(a, b):
        if lo2 is not None and (lo1 is None or lo1 < lo2):
            return False
        if hi2 is not None and (hi1 is None or hi1 > hi2):
            return False
    return True


def _prune(box_list):
    out = []
    for box in box_list:
        if box in out:
            continue
        if any(_box_subset(box, other) and box != other for other in box_list):
            continue
        out.append(box)
    return out


def box_escape_directions(box):
    """Directions ``(axis, sign)`` along which the box is unbounded."""
    out = []
    for axis, (lo, hi) in enumerate(box):
        if lo is None:
            out.append((axis, "-"))
        if hi is None:
            out.append((axis, "+"))
    return out


def box_is_bounded(box):
    return all(lo is not None and hi is not None for lo, hi in box)


def box_corner_bound(box, metric):
    """Largest distance to the origin over the (bounded) box."""
    per_axis = [max(abs(lo), abs(hi)) for lo, hi in box]
    return sum(per_axis) if metric == "l1" else max(per_axis)


def box_window_point(box, space, far_axis=None, far_sign=None):
    """A window point inside the box, pushed to the window edge along one axis."""
    coords = []
    n = space.radius
    for axis, (lo, hi) in enumerate(box):
        lo_eff = -n if lo is None else max(lo, -n)
        hi_eff = n if hi is None else min(hi, n)
        if lo_eff > hi_eff:
            return None
        if axis == far_axis:
            coords.append(hi_eff if far_sign == "+" else lo_eff)
        else:
            coords.append(min(max(0, lo_eff), hi_eff))
    return tuple(coords)


def box_distance(point, box, metric):
    """Exact distance from a lattice point to a box."""
    gaps = []
    for c, (lo, hi) in zip(point, box):
        gap = 0
        if lo is not None and c < lo:
            gap = lo - c
        elif hi is not None and c > hi:
            gap = c - hi
        gaps.append(gap)
    return sum(gaps) if metric == "l1" else max(gaps)


# ---------------------------------------------------------------------------
# boundedness


SCAN_POINT_CAP = 100_000


def is_bounded(expr, space, sweep=None):
    """Windowed boundedness verdict with a safety margin.

    The symbolic box route, when available, decides the question exactly on
    the infinite lattice; the scan route reports the margin-ruled verdict
    from the window.  When both run they must agree, and the certificate is
    marked accordingly.  On windows too large to scan, a symbolic verdict
    stands alone (and the question is an error without one).
    """
    sweep = sweep or Sweep()
    box_list = boxes(expr, space)
    symbolic = None
    if box_list is not None:
        symbolic = _bounded_from_boxes(box_list, expr, space, sweep)
    if space.size_estimate() > SCAN_POINT_CAP:
        if symbolic is None:
            raise ValueError(
                f"window too large to scan and no box form for {expr.to_text()}"
            )
        return symbolic
    scan = _bounded_from_scan(expr, space, sweep)
    if symbolic is None:
        return scan
    # Sound cross-check: a symbolically unbounded set must show far members
    # on the window; the converse can fail for bounded sets hugging the edge,
    # which is exactly what the symbolic route is for.
    if symbolic.verdict == UNBOUNDED and scan.verdict == BOUNDED:
        raise AssertionError(
            f"symbolic says unbounded but the scan found no far members: {expr.to_text()}"
        )
    symbolic.method = "symbolic+scan"
    if symbolic.verdict == BOUNDED and scan.verdict == BOUNDED:
        symbolic.bound = scan.bound  # minimal observed bound from the window
    return symbolic


def _bounded_from_scan(expr, space, sweep):
    mask = membership_mask(expr, space)
    dists = space.base_distances()
    member = dists[mask]
    if member.size == 0:
        return BoundednessCertificate(BOUNDED, 0, method="scan", sweep=sweep)
    bound = int(member.max())
    verdict = sweep.classify(space, bound)
    witnesses = []
    if verdict == UNBOUNDED:
        order = np.argsort(-dists * mask)
        witnesses = [space.points()[i] for i in order[:3] if mask[i]]
    return BoundednessCertificate(verdict, bound, witnesses, "scan", sweep)


def _bounded_from_boxes(box_list, expr, space, sweep):
    live = []
    for box in box_list:
        if box_window_point(box, space) is not None:
            live.append(box)
    if not live:
        return BoundednessCertificate(BOUNDED, 0, method="symbolic", sweep=sweep)
    unbounded = [box for box in live if not box_is_bounded(box)]
    if unbounded:
        witnesses = []
        for box in unbounded[:3]:
            axis, sign = box_escape_directions(box)[0]
            w = box_window_point(box, space, axis, sign)
            if w is not None:
                witnesses.append(w)
        return BoundednessCertificate(
            UNBOUNDED, witnesses=witnesses, method="symbolic", sweep=sweep
        )
    bound = max(box_corner_bound(box, space.metric) for box in live)
    return BoundednessCertificate(BOUNDED, bound, method="symbolic", sweep=sweep)


# ---------------------------------------------------------------------------
# canonical textual form

def parse_expr(text, names=None):
    """Parse the canonical textual form of a subset expression.

    ``names`` maps identifiers to previously declared expressions, so config
    files can build covers out of named pieces.

    >>> parse_expr("and(halfspace(axis=0,sign=+),not(ball((0 0),2)))").to_text()
    'and(halfspace(axis=0,sign=+),not(ball((0 0),2)))'
    """
    names = names or {}
    expr, rest = _parse(text.strip(), names)
    if rest.strip():
        raise ValueError(f"trailing input in subset expression: {rest!r}")
    return expr


def _parse(text, names):
    text = text.lstrip()
    head = ""
    i = 0
    while i < len(text) and (text[i].isalnum() or text[i] in "_"):
        head += text[i]
        i += 1
    rest = text[i:].lstrip()
    if not rest.startswith("("):
        if head == "all":
            return All(), rest
        if head == "empty":
            return Empty(), rest
        if head in names:
            return names[head], rest
        raise ValueError(f"unknown subset name {head!r}")
    args, rest = _split_args(rest)
    if head == "not":
        return Complement(parse_expr(args[0], names)), rest
    if head == "and":
        return Intersection([parse_expr(a, names) for a in args]), rest
    if head == "or":
        return Union([parse_expr(a, names) for a in args]), rest
    if head == "thicken":
        return Thicken(parse_expr(args[0], names), int(args[1])), rest
    if head == "halfspace":
        kw = _keywords(args)
        return (
            HalfSpace(int(kw["axis"]), kw["sign"], int(kw.get("offset", 0))),
            rest,
        )
    if head == "quadrant":
        return Quadrant([a.strip() for a in args]), rest
    if head == "cone":
        return Cone(args[0].strip(), _axis_ref(args[1]), _axis_ref(args[2])), rest
    if head == "ball":
        return Ball(_parse_point(args[0]), int(args[1])), rest
    if head == "points":
        return FinitePointSet([_parse_point(a) for a in args]), rest
    if head == "treeprefix":
        return TreePrefix(_parse_point(args[0])), rest
    raise ValueError(f"unknown subset constructor {head!r}")


def _split_args(text):
    assert text.startswith("(")
    depth = 0
    args = []
    current = []
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
            if depth == 1:
                continue
        elif ch == ")":
            depth -= 1
            if depth == 0:
                if current or args:
                    args.append("".join(current).strip())
                return args, text[i + 1 :]
        elif ch == "," and depth == 1:
            args.append("".join(current).strip())
            current = []
            continue
        if depth >= 1:
            current.append(ch)
    raise ValueError(f"unbalanced parentheses in {text!r}")


def _keywords(args):
    out = {}
    for a in args:
        k, _, v = a.partition("=")
        out[k.strip()] = v.strip()
    return out


def _axis_ref(text):
    text = text.strip()
    if text.startswith("|x") and text.endswith("|"):
        return int(text[2:-1])
    raise ValueError(f"expected |x<axis>|, got {text!r}")


def _parse_point(text):
    text = text.strip()
    if text.startswith("("):
        inner = text[1:-1].strip()
        if not inner:
            return ()
        return tuple(int(x) for x in inner.split())
    return (int(text),)
