"""Coarse-cover verification and the cocontrolled-tuple oracle.

The oracle answers, for a tuple of blocks ``(B_0, ..., B_q)``, whether the
product set is cocontrolled: for every scale R the set of tuples
``(x_0, ..., x_q)`` with ``x_j in B_j`` and pairwise distances at most R is
bounded.  Everything downstream (closeness complexes, cocycle support
certificates, cover checks) reduces to this question.

Two routes again: an exhaustive window scan with a safety margin, and a
symbolic route for blocks representable as box unions on a lattice, which
decides the infinite-space question exactly.  The verdict only depends on
the *set* of blocks in the tuple (repeats and order are immaterial, since
witnesses can be duplicated and permuted), so queries are canonicalized
and cached on the support set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .subsets import (
    All,
    Complement,
    Intersection,
    SubsetExpr,
    Thicken,
    box_window_point,
    boxes,
    is_bounded,
    membership_mask,
)
from .sweeps import BOUNDED, INCONCLUSIVE, UNBOUNDED, BoundednessCertificate, Sweep

SCAN_STEP_CAP = 2_000_000

_ORACLE_CACHE = {}
_NEIGHBOR_CACHE = {}


@dataclass
class TupleControlVerdict:
    """Per-scale boundedness of the R-close tuples drawn from the blocks."""

    verdict: str  # cocontrolled / not-cocontrolled / inconclusive
    per_scale: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    method: str = "scan"
    sweep: Sweep = field(default_factory=Sweep)

    @property
    def is_cocontrolled(self):
        return self.verdict == "cocontrolled"

    @property
    def is_inconclusive(self):
        return self.verdict == "inconclusive"

    def bound(self, scale):
        cert = self.per_scale.get(scale)
        return cert.bound if cert else 0

    def to_json(self):
        return {
            "verdict": self.verdict,
            "method": self.method,
            "per_scale": {
                str(r): cert.to_json() for r, cert in sorted(self.per_scale.items())
            },
        }


@dataclass
class CoverVerdict:
    is_cover: bool
    inconclusive: bool = False
    per_scale: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    method: str = "scan"
    sweep: Sweep = field(default_factory=Sweep)

    def to_json(self):
        return {
            "is_cover": self.is_cover,
            "inconclusive": self.inconclusive,
            "method": self.method,
            "per_scale": {
                str(r): cert.to_json() for r, cert in sorted(self.per_scale.items())
            },
        }


def neighbor_lists(space, scale):
    """Per-point arrays of window indices within the scale (self excluded)."""
    key = (space.key, scale)
    if key not in _NEIGHBOR_CACHE:
        pairs = space.pairs_within(scale)
        n = len(space.points())
        raw = [[] for _ in range(n)]
        for i, j in pairs:
            raw[i].append(j)
            raw[j].append(i)
        _NEIGHBOR_CACHE[key] = [np.array(sorted(x), dtype=np.int64) for x in raw]
    return _NEIGHBOR_CACHE[key]


# ---------------------------------------------------------------------------
# the tuple oracle


def is_cocontrolled_tuple(blocks, space, sweep=None):
    """Oracle for the blocks' product set; see the module docstring.

    ``blocks`` may be subset expressions or boolean window masks.  Verdicts
    are cached when every block is an expression.
    """
    sweep = sweep or Sweep()
    if not blocks:
        raise ValueError("need at least one block")
    all_exprs = all(isinstance(b, SubsetExpr) for b in blocks)
    cache_key = None
    if all_exprs:
        support = tuple(sorted({b.key() for b in blocks}))
        cache_key = (space.key, sweep, support)
        if cache_key in _ORACLE_CACHE:
            return _ORACLE_CACHE[cache_key]
        unique = {b.key(): b for b in blocks}
        block_set = [unique[k] for k in sorted(unique)]
    else:
        block_set = []
        seen = set()
        for b in blocks:
            key = b.key() if isinstance(b, SubsetExpr) else (id(b), b.tobytes())
            if key not in seen:
                seen.add(key)
                block_set.append(b)

    verdict = _oracle_symbolic(block_set, space, sweep)
    if verdict is None:
        verdict = _oracle_scan(block_set, space, sweep)
    if cache_key is not None:
        _ORACLE_CACHE[cache_key] = verdict
    return verdict


def _oracle_symbolic(blocks, space, sweep):
    box_lists = []
    for b in blocks:
        bl = boxes(b, space) if isinstance(b, SubsetExpr) else None
        if bl is None:
            return None
        live = [box for box in bl if box_window_point(box, space) is not None]
        if not live:
            # an empty block kills every tuple through it
            per_scale = {
                r: BoundednessCertificate(BOUNDED, 0, method="symbolic", sweep=sweep)
                for r in sweep.scales
            }
            return TupleControlVerdict(
                "cocontrolled", per_scale, [], "symbolic", sweep
            )
        box_lists.append(live)

    # a tuple escapes to infinity iff some choice of boxes shares an
    # unbounded direction on some axis; offsets never matter in the end
    for choice in itertools.product(*box_lists):
        for axis in range(space.dim):
            if all(box[axis][1] is None for box in choice):
                sign = "+"
            elif all(box[axis][0] is None for box in choice):
                sign = "-"
            else:
                continue
            witnesses = [
                w
                for box in choice
                if (w := box_window_point(box, space, axis, sign)) is not None
            ]
            per_scale = {
                r: BoundednessCertificate(
                    UNBOUNDED, witnesses=witnesses, method="symbolic", sweep=sweep
                )
                for r in sweep.scales
            }
            return TupleControlVerdict(
                "not-cocontrolled", per_scale, witnesses, "symbolic", sweep
            )

    per_scale = {}
    for r in sweep.scales:
        bound = 0
        for choice in itertools.product(*box_lists):
            b = _choice_bound(choice, r, space)
            if b is not None:
                bound = max(bound, b)
        per_scale[r] = BoundednessCertificate(
            BOUNDED, bound, method="symbolic", sweep=sweep
        )
    return TupleControlVerdict("cocontrolled", per_scale, [], "symbolic", sweep)


def _choice_bound(choice, scale, space):
    """Upper bound on coordinates of scale-close tuples through these boxes.

    Called only for choices with no common escape direction, so every axis
    carries a finite cap from above and below.  Pairwise L1 or Linf distance
    at most the scale forces per-axis gaps of at most the scale, which is
    all the bound uses (a sound relaxation).  Returns None when the boxes
    cannot meet at this scale.
    """
    per_axis = []
    for axis in range(space.dim):
        los = [box[axis][0] for box in choice]
        his = [box[axis][1] for box in choice]
        finite_lo = [x for x in los if x is not None]
        finite_hi = [x for x in his if x is not None]
        if max(finite_lo) > min(finite_hi) + scale:
            return None  # no scale-window meets every interval on this axis
        hi_eff = min(finite_hi) + scale
        lo_eff = max(finite_lo) - scale
        per_axis.append(max(abs(lo_eff), abs(hi_eff)))
    return sum(per_axis) if space.metric == "l1" else max(per_axis)


def _oracle_scan(blocks, space, sweep):
    masks = [
        membership_mask(b, space) if isinstance(b, SubsetExpr) else np.asarray(b, bool)
        for b in blocks
    ]
    dists = space.base_distances()
    per_scale = {}
    all_witnesses = []
    for r in sweep.scales:
        found = _scan_scale(masks, space, r, dists)
        if found is None:
            per_scale[r] = BoundednessCertificate(
                INCONCLUSIVE,
                method="scan",
                sweep=sweep,
                notes={"reason": "scan step cap exceeded"},
            )
            continue
        bound, witness = found
        if bound < 0:
            per_scale[r] = BoundednessCertificate(BOUNDED, 0, method="scan", sweep=sweep)
            continue
        verdict = sweep.classify(space, bound)
        cert = BoundednessCertificate(verdict, bound, method="scan", sweep=sweep)
        if verdict == UNBOUNDED and witness is not None:
            cert.witnesses = [witness]
            all_witnesses.append(witness)
        per_scale[r] = cert

    verdicts = {c.verdict for c in per_scale.values()}
    if verdicts <= {BOUNDED}:
        overall = "cocontrolled"
    elif UNBOUNDED in verdicts:
        overall = "not-cocontrolled"
    else:
        overall = "inconclusive"
    return TupleControlVerdict(overall, per_scale, all_witnesses, "scan", sweep)


def _scan_scale(masks, space, scale, dists):
    """Largest coordinate distance over scale-close tuples, with a witness.

    Returns ``(bound, witness)``, ``bound = -1`` when no tuple exists, or
    None when the step cap is exceeded.  The first block is walked farthest
    point first; the first completed tuple wins.  Every other tuple keeps
    its first slot within that distance and its remaining slots within one
    scale more, so the reported bound carries a ``+ scale`` cushion to stay
    a sound upper bound for every coordinate of every tuple.
    """
    if len(masks) == 1:
        member = dists[masks[0]]
        if member.size == 0:
            return (-1, None)
        idx = int(np.argmax(np.where(masks[0], dists, -1)))
        return (int(member.max()), (space.points()[idx],))

    neighbors = neighbor_lists(space, scale)
    order = np.argsort(-dists, kind="stable")
    pts = space.points()
    budget = [SCAN_STEP_CAP]
    for idx in order:
        if not masks[0][idx]:
            continue
        budget[0] -= 1
        if budget[0] <= 0:
            return None
        tup = _complete_tuple(idx, masks[1:], neighbors, space, scale, budget)
        if tup == "cap":
            return None
        if tup is not None:
            witness = tuple(pts[i] for i in (idx,) + tup)
            bound = max(int(dists[i]) for i in (idx,) + tup) + scale
            return (bound, witness)
    return (-1, None)


def _complete_tuple(idx, rest_masks, neighbors, space, scale, budget):
    """Depth-first completion of a scale-close tuple through the blocks."""
    pts = space.points()
    pool = np.append(neighbors[idx], idx)

    def extend(chosen, depth):
        if depth == len(rest_masks):
            return ()
        mask = rest_masks[depth]
        for j in pool:
            budget[0] -= 1
            if budget[0] <= 0:
                return "cap"
            if not mask[j]:
                continue
            if all(space.distance(pts[j], pts[k]) <= scale for k in chosen):
                tail = extend(chosen + (j,), depth + 1)
                if tail == "cap" or tail is not None:
                    return tail if tail == "cap" else (j,) + tail
        return None

    return extend((), 0)


# ---------------------------------------------------------------------------
# coarse covers


def _relative_complement(universe, part):
    if isinstance(universe, All):
        return Complement(part)
    return Intersection([universe, Complement(part)])


def is_coarse_cover(universe, parts, space, sweep=None):
    """Do the parts coarsely cover the universe?

    For each sweep scale the R-thickenings of the part complements (within
    the universe) must intersect in a bounded set, with margin.
    """
    sweep = sweep or Sweep()
    if not parts:
        raise ValueError("a cover needs at least one part")
    per_scale = {}
    witnesses = []
    methods = []
    for r in sweep.scales:
        pieces = [Thicken(_relative_complement(universe, p), r) for p in parts]
        if not isinstance(universe, All):
            pieces.append(universe)
        expr = Intersection(pieces) if len(pieces) > 1 else pieces[0]
        cert = is_bounded(expr, space, sweep)
        per_scale[r] = cert
        methods.append(cert.method)
        if cert.verdict == UNBOUNDED:
            witnesses.extend(cert.witnesses)
    verdicts = {c.verdict for c in per_scale.values()}
    method = methods[0] if len(set(methods)) == 1 else "mixed"
    if verdicts <= {BOUNDED}:
        return CoverVerdict(True, False, per_scale, [], method, sweep)
    if UNBOUNDED in verdicts:
        return CoverVerdict(False, False, per_scale, witnesses, method, sweep)
    return CoverVerdict(False, True, per_scale, [], method, sweep)


def is_coarse_disjoint_union(parts, universe, space, sweep=None):
    """Pairwise disjoint on the window and a coarse cover of the universe."""
    sweep = sweep or Sweep()
    masks = [membership_mask(p, space) for p in parts]
    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            overlap = masks[i] & masks[j]
            if overlap.any():
                witness = space.points()[int(np.argmax(overlap))]
                return CoverVerdict(
                    False,
                    False,
                    witnesses=[witness],
                    method="disjointness",
                    sweep=sweep,
                )
    return is_coarse_cover(universe, parts, space, sweep)


def complement_union_bound(universe, parts, q, scale, space, sweep=None):
    """Bound the scale-close (q+1)-tuples avoiding every single part.

    Scans tuples in the universe with pairwise distance at most the scale
    such that no part contains the whole tuple.  Their union must be
    bounded whenever the parts coarsely cover the universe; running this in
    a higher degree is a self-check of the cover verdict.
    """
    sweep = sweep or Sweep()
    uni = membership_mask(universe, space)
    part_masks = [membership_mask(p, space) for p in parts]
    dists = space.base_distances()
    neighbors = neighbor_lists(space, scale)
    pts = space.points()
    budget = [SCAN_STEP_CAP]
    order = np.argsort(-dists, kind="stable")

    def extend(anchor, chosen, alive):
        """Grow a tuple anchored at ``anchor``; ``alive`` = parts still
        containing every chosen coordinate.  Returns a completed uncovered
        tuple, None, or 'cap'."""
        if len(chosen) == q + 1:
            return () if not alive else None
        pool = np.append(neighbors[anchor], anchor)
        for j in pool:
            budget[0] -= 1
            if budget[0] <= 0:
                return "cap"
            if not uni[j]:
                continue
            if not all(space.distance(pts[j], pts[k]) <= scale for k in chosen):
                continue
            now_alive = [m for m in alive if m[j]]
            tail = extend(anchor, chosen + (j,), now_alive)
            if tail == "cap":
                return "cap"
            if tail is not None:
                return (j,) + tail
        return None

    for idx in order:
        if not uni[idx]:
            continue
        budget[0] -= 1
        if budget[0] <= 0:
            return BoundednessCertificate(
                INCONCLUSIVE,
                method="scan",
                sweep=sweep,
                notes={"reason": "scan step cap exceeded"},
            )
        alive = [m for m in part_masks if m[idx]]
        tail = extend(idx, (idx,), alive)
        if tail == "cap":
            return BoundednessCertificate(
                INCONCLUSIVE,
                method="scan",
                sweep=sweep,
                notes={"reason": "scan step cap exceeded"},
            )
        if tail is not None:
            tup = (idx,) + tail
            bound = max(int(dists[i]) for i in tup)
            witness = tuple(pts[i] for i in tup)
            verdict = sweep.classify(space, bound)
            cert = BoundednessCertificate(verdict, bound, method="scan", sweep=sweep)
            if verdict != BOUNDED:
                cert.witnesses = [witness]
            return cert
    return BoundednessCertificate(BOUNDED, 0, method="scan", sweep=sweep)
