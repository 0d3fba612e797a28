"""Cech complexes of coarse covers with constant coefficients.

A verified coarse cover contributes, for every finite intersection of
parts, one copy of the coefficient group per unbounded coarse component
(bounded intersections contribute nothing).  Restriction maps follow which
component of the larger intersection contains each component's witness
point, and the resulting integer complex goes through the same exact
cohomology engine as everything else.

Intersections of half-spaces on a lattice are single boxes, whose ends are
classified symbolically (a box is bounded, a two-ended line times a
bounded factor, or one-ended); everything else runs through the windowed
ends machinery.  The two routes are cross-checked in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import snf
from .cohomology import cohomology_with_coefficients
from .covers import is_coarse_cover
from .ends import default_annuli, end_labels
from .subsets import All, Intersection, box_window_point, boxes
from .sweeps import Sweep


class CoverNotVerifiedError(ValueError):
    pass


@dataclass
class IntersectionData:
    parts: tuple  # sorted part indices
    end_count: int
    witnesses: list  # one window point per end, in end order
    classify: object  # callable point -> end index (far points only)
    method: str
    flagged: bool = False


@dataclass
class CechCover:
    parts: list
    space: object
    sweep: Sweep
    intersections: dict = field(default_factory=dict)
    basis: dict = field(default_factory=dict)  # q -> list of (sigma, end index)
    diffs: list = field(default_factory=list)
    dims: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    cover_verdict: object = None

    def nonempty_simplices(self):
        return sorted(
            sigma for sigma, data in self.intersections.items() if data.end_count > 0
        )

    def to_json(self):
        return {
            "parts": [p.to_text() for p in self.parts],
            "simplices": [list(s) for s in self.nonempty_simplices()],
            "ends_per_intersection": {
                ",".join(map(str, sigma)): data.end_count
                for sigma, data in sorted(self.intersections.items())
                if data.end_count
            },
            "flagged": [list(s) for s in self.flagged],
        }


def _box_end_structure(box, space):
    """End count and labels of a single box: directions along free axes."""
    free = [a for a, (lo, hi) in enumerate(box) if lo is None and hi is None]
    half = [
        (a, "+" if hi is None else "-")
        for a, (lo, hi) in enumerate(box)
        if (lo is None) != (hi is None)
    ]
    if not free and not half:
        return 0, []
    if len(free) == 1 and not half:
        axis = free[0]
        return 2, [(axis, "-"), (axis, "+")]
    return 1, [None]


def _symbolic_intersection(sigma, box, space):
    count, labels = _box_end_structure(box, space)
    witnesses = []
    for label in labels:
        if label is None:
            axis, sign = (None, None)
            for a, (lo, hi) in enumerate(box):
                if hi is None:
                    axis, sign = a, "+"
                    break
                if lo is None:
                    axis, sign = a, "-"
                    break
            witnesses.append(box_window_point(box, space, axis, sign))
        else:
            axis, sign = label
            witnesses.append(box_window_point(box, space, axis, sign))

    if count == 2:
        axis = labels[0][0]

        def classify(p, axis=axis):
            return 0 if p[axis] < 0 else 1

    elif count == 1:

        def classify(p):
            return 0

    else:
        classify = None
    return IntersectionData(sigma, count, witnesses, classify, "symbolic")


def _scan_intersection(sigma, expr, space, sweep, annuli):
    report, classify = end_labels(expr, space, sweep, annuli)
    flagged = report.verdict != "finite"
    count = report.count if report.verdict == "finite" else 0
    return IntersectionData(
        sigma, count, list(report.witnesses), classify, "scan", flagged
    )


def _intersection_data(sigma, parts, space, sweep, annuli):
    expr = (
        parts[sigma[0]] if len(sigma) == 1 else Intersection([parts[i] for i in sigma])
    )
    box_list = boxes(expr, space)
    if box_list is not None:
        live = [b for b in box_list if box_window_point(b, space) is not None]
        if not live:
            return IntersectionData(sigma, 0, [], None, "symbolic")
        if len(live) == 1:
            return _symbolic_intersection(sigma, live[0], space)
    if space.size_estimate() > 100_000:
        raise ValueError(
            f"intersection {sigma} needs a window scan but the window is too large"
        )
    return _scan_intersection(sigma, expr, space, sweep, annuli)


def build_cech_cover(
    parts,
    space,
    group,
    sweep=None,
    max_degree=None,
    universe=None,
    annuli=None,
    require_cover=True,
):
    """Assemble the cover's complex and compute its cohomology.

    Returns ``(cover, result)``; ``max_degree`` defaults to the number of
    parts minus one and caps the intersection depth at ``max_degree + 2``.
    """
    sweep = sweep or Sweep()
    universe = universe or All()
    n = len(parts)
    if max_degree is None:
        max_degree = n - 1
    verdict = is_coarse_cover(universe, parts, space, sweep)
    if require_cover and not verdict.is_cover:
        raise CoverNotVerifiedError("parts do not verifiably form a coarse cover")

    cover = CechCover(parts=list(parts), space=space, sweep=sweep)
    cover.cover_verdict = verdict
    depth_cap = min(n, max_degree + 2)
    for size in range(1, depth_cap + 1):
        for sigma in itertools.combinations(range(n), size):
            if size > 1 and any(
                cover.intersections[tau].end_count == 0
                for tau in itertools.combinations(sigma, size - 1)
            ):
                # an intersection inside a bounded one is bounded
                cover.intersections[sigma] = IntersectionData(
                    sigma, 0, [], None, "inherited"
                )
                continue
            data = _intersection_data(sigma, parts, space, sweep, annuli)
            cover.intersections[sigma] = data
            if data.flagged:
                cover.flagged.append(sigma)

    basis = {}
    for q in range(depth_cap):
        basis[q] = [
            (sigma, e)
            for sigma in sorted(s for s in cover.intersections if len(s) == q + 1)
            for e in range(cover.intersections[sigma].end_count)
        ]
    cover.basis = basis
    cover.dims = [len(basis[q]) for q in range(depth_cap)]

    diffs = []
    for q in range(depth_cap - 1):
        rows = {be: i for i, be in enumerate(basis[q + 1])}
        cols = {be: i for i, be in enumerate(basis[q])}
        d = snf.zeros(len(rows), len(cols))
        for (tau, e), i in rows.items():
            witness = cover.intersections[tau].witnesses[e]
            for j in range(len(tau)):
                sigma = tau[:j] + tau[j + 1 :]
                data = cover.intersections[sigma]
                if data.end_count == 0:
                    continue
                end = data.classify(witness)
                if end is None:
                    raise AssertionError(
                        f"witness {witness} of {tau} has no end in {sigma}"
                    )
                d[i][cols[(sigma, end)]] += (-1) ** j
        diffs.append(d)
    for q in range(len(diffs) - 1):
        rows_next, _ = snf.shape(diffs[q + 1])
        rows, cols = snf.shape(diffs[q])
        if rows and cols and rows_next:
            if not snf.is_zero(snf.matmul(diffs[q + 1], diffs[q])):
                raise AssertionError("Cech coboundary square is nonzero")
    cover.diffs = diffs

    result = cohomology_with_coefficients(
        diffs,
        group,
        max_degree=max_degree,
        dims=cover.dims + [0] * (max_degree + 2 - len(cover.dims)),
    )
    result.route = "cech+snf"
    if cover.flagged:
        result.notes["unreliable_intersections"] = [list(s) for s in cover.flagged]
    return cover, result


def halfspace_cover(dim):
    """The 2n half-spaces covering the rank-n lattice."""
    from .subsets import HalfSpace

    parts = []
    for axis in range(dim):
        parts.append(HalfSpace(axis, "+"))
        parts.append(HalfSpace(axis, "-"))
    return parts


def nerve_comparison_report(cover):
    """The abstract nerve, for comparison with topological covers."""
    simplices = cover.nonempty_simplices()
    by_dim = {}
    for s in simplices:
        by_dim.setdefault(len(s) - 1, []).append(list(s))
    counts = {q: len(v) for q, v in sorted(by_dim.items())}
    report = {
        "vertex_count": counts.get(0, 0),
        "simplex_counts": counts,
        "simplices": {str(q): v for q, v in sorted(by_dim.items())},
    }
    # how the nerve compares with the boundary of the cross-polytope on the
    # same vertices, the nerve of the hemisphere cover of a sphere
    n = counts.get(0, 0) // 2
    if n >= 1 and counts.get(0, 0) == 2 * n:
        expected = {
            q: _cross_polytope_count(n, q) for q in range(max(counts) + 1)
        }
        report["matches_cross_polytope"] = all(
            counts.get(q, 0) == expected.get(q, 0) for q in expected
        )
    return report


def _cross_polytope_count(n, q):
    """Number of q-faces of the n-dimensional cross-polytope boundary."""
    from math import comb

    if q >= n:
        return 0
    return comb(n, q + 1) * 2 ** (q + 1)


def nerve_dot(cover):
    """DOT text of the nerve's 1-skeleton."""
    lines = ["graph nerve {"]
    for sigma in cover.nonempty_simplices():
        if len(sigma) == 1:
            lines.append(f'  p{sigma[0]} [label="{cover.parts[sigma[0]].to_text()}"];')
        elif len(sigma) == 2:
            lines.append(f"  p{sigma[0]} -- p{sigma[1]};")
    lines.append("}")
    return "\n".join(lines)
