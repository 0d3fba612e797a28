"""Ends: unbounded coarse components and the degree-zero group.

A subset's ends are counted over a grid of (scale, annulus radius) cells:
drop the points inside the annulus radius, connect the survivors at the
scale, and keep the components that reach the outer shell of the window.
A count that holds steady across the tail of the grid is trusted; growth
along the grid reports an infinite-ends space; anything else stays
Inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cohomology import CohomologyResult
from .groups import FinAbGroup
from .subsets import membership_mask
from .sweeps import Sweep


@dataclass
class EndsReport:
    verdict: str  # finite / growing / inconclusive
    count: int = 0
    table: dict = field(default_factory=dict)  # (scale, radius) -> component count
    growth: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)  # one far point per end
    sweep: Sweep = field(default_factory=Sweep)

    @property
    def is_finite(self):
        return self.verdict == "finite"

    def to_json(self):
        out = {
            "verdict": self.verdict,
            "table": {f"{r},{rad}": c for (r, rad), c in sorted(self.table.items())},
        }
        if self.verdict == "finite":
            out["count"] = self.count
        if self.verdict == "growing":
            out["growth"] = self.growth
        return out


def default_annuli(space):
    """Annulus radii spanning the window interior; the shell stays clear."""
    n = space.window_radius
    radii = sorted({max(1, round(n * f)) for f in (0.2, 0.3, 0.4, 0.5, 0.6)})
    return radii


def shell_threshold(space, sweep):
    return (1 - sweep.margin) * space.window_radius


def _components_outside(space, mask, scale, radius, shell):
    """Component count and witnesses outside the annulus at the scale."""
    dists = space.base_distances()
    keep = mask & (dists > radius)
    idx = np.nonzero(keep)[0]
    if idx.size == 0:
        return 0, []
    pos = -np.ones(len(mask), dtype=np.int64)
    pos[idx] = np.arange(idx.size)
    pairs = space.pairs_within(scale)
    if len(pairs):
        sel = keep[pairs[:, 0]] & keep[pairs[:, 1]]
        rows = pos[pairs[sel, 0]]
        cols = pos[pairs[sel, 1]]
    else:
        rows = cols = np.array([], dtype=np.int64)
    graph = coo_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(idx.size, idx.size)
    )
    n_comp, labels = connected_components(graph, directed=False)
    reach = {}
    for local, global_idx in enumerate(idx):
        if dists[global_idx] >= shell:
            lab = labels[local]
            prev = reach.get(lab)
            if prev is None or dists[global_idx] > dists[prev]:
                reach[lab] = global_idx
    witnesses = [space.points()[reach[lab]] for lab in sorted(reach)]
    return len(reach), witnesses


def count_ends(expr, space, sweep=None, annuli=None):
    """Stabilized count of unbounded coarse components of the subset."""
    sweep = sweep or Sweep()
    annuli = annuli if annuli is not None else default_annuli(space)
    mask = membership_mask(expr, space)
    shell = shell_threshold(space, sweep)
    table = {}
    witness_rows = {}
    for scale in sweep.scales:
        for radius in annuli:
            count, witnesses = _components_outside(space, mask, scale, radius, shell)
            table[(scale, radius)] = count
            witness_rows[(scale, radius)] = witnesses

    top = max(sweep.scales)
    tail = [table[(top, radius)] for radius in annuli]
    growth = tail
    report = EndsReport("inconclusive", table=table, growth=growth, sweep=sweep)
    if len(tail) >= 3 and tail[-1] == tail[-2] == tail[-3]:
        # counts must also be non-increasing in the scale (merging only)
        stable = all(
            table[(a, annuli[-1])] >= table[(b, annuli[-1])]
            for a, b in zip(sorted(sweep.scales), sorted(sweep.scales)[1:])
        )
        if stable:
            report.verdict = "finite"
            report.count = tail[-1]
            report.witnesses = witness_rows[(top, annuli[-1])]
            return report
    if len(tail) >= 3 and tail[-3] < tail[-2] < tail[-1]:
        report.verdict = "growing"
    return report


def end_labels(expr, space, sweep=None, annuli=None):
    """Deterministic end labeling: the report plus a classifier for points.

    Returns ``(report, classify)`` where ``classify(p)`` gives the end index
    of a far member point (or None for points inside the annulus).  Ends are
    indexed by the window order of their first member.
    """
    sweep = sweep or Sweep()
    annuli = annuli if annuli is not None else default_annuli(space)
    report = count_ends(expr, space, sweep, annuli)
    mask = membership_mask(expr, space)
    dists = space.base_distances()
    scale = max(sweep.scales)
    radius = annuli[-1]
    shell = shell_threshold(space, sweep)

    keep = mask & (dists > radius)
    idx = np.nonzero(keep)[0]
    pos = -np.ones(len(mask), dtype=np.int64)
    pos[idx] = np.arange(idx.size)
    pairs = space.pairs_within(scale)
    if len(pairs):
        sel = keep[pairs[:, 0]] & keep[pairs[:, 1]]
        rows = pos[pairs[sel, 0]]
        cols = pos[pairs[sel, 1]]
    else:
        rows = cols = np.array([], dtype=np.int64)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(idx.size, idx.size))
    _, labels = connected_components(graph, directed=False)

    reaching = sorted(
        {labels[local] for local, g in enumerate(idx) if dists[g] >= shell}
    )
    # index ends by the first window point belonging to them
    first_member = {}
    for local, g in enumerate(idx):
        lab = labels[local]
        if lab in reaching and lab not in first_member:
            first_member[lab] = g
    ordered = sorted(first_member, key=lambda lab: first_member[lab])
    end_index = {lab: i for i, lab in enumerate(ordered)}

    # one witness per end, the farthest member, in end-index order
    farthest = {}
    for local, g in enumerate(idx):
        lab = labels[local]
        if lab in end_index:
            best = farthest.get(lab)
            if best is None or dists[g] > dists[best]:
                farthest[lab] = g
    report.witnesses = [
        space.points()[farthest[lab]] for lab in ordered
    ]

    point_index = space.point_index()

    def classify(p):
        g = point_index[p]
        if not keep[g]:
            return None
        lab = labels[pos[g]]
        return end_index.get(lab)

    return report, classify


def degree_zero_cohomology(expr, space, group, sweep=None, annuli=None):
    """``H^0`` of the subset: one copy of the coefficients per end."""
    if not isinstance(group, FinAbGroup):
        group = FinAbGroup(group)
    report = count_ends(expr, space, sweep, annuli)
    result = CohomologyResult(route="ends")
    if report.verdict == "finite":
        result.factors[0] = list(group.power(report.count).factors)
    elif report.verdict == "growing":
        result.infinite_degrees.add(0)
    else:
        result.notes["inconclusive"] = True
    result.notes["ends"] = report.to_json()
    return result
