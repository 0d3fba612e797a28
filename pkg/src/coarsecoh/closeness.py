"""The closeness complex of a partition and its cohomology.

Fix a partition of a subset into blocks.  A set of blocks spans a face iff
their product is *not* cocontrolled, i.e. they come within every scale of
each other arbitrarily far out.  Faces of faces are faces (witness tuples
restrict), bounded blocks span nothing (they are dropped), and the verdict
for a tuple only depends on its support set, so the data is an abstract
simplicial complex on the unbounded blocks.

Cohomology of the partition's blocky cochains modulo cocontrolled support
is then simplicial cohomology of this complex; the artifact computes the
normalized (distinct ordered vertices) complex and validates the reduction
against the full tuple complex in the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import snf
from .cohomology import cohomology_with_coefficients
from .covers import is_cocontrolled_tuple
from .sweeps import BOUNDED, Sweep


@dataclass
class ClosenessComplex:
    n_blocks: int
    faces: set  # frozensets of block indices, downward closed
    dropped: list = field(default_factory=list)  # bounded blocks
    inconclusive: list = field(default_factory=list)  # tuples forced present
    provenance: dict = field(default_factory=dict)
    dim_cap: int = 0

    def vertices(self):
        return sorted(s for s in self.faces if len(s) == 1)

    def simplices(self, q):
        """Sorted (q+1)-tuples with strictly increasing entries."""
        return sorted(tuple(sorted(s)) for s in self.faces if len(s) == q + 1)

    @property
    def dimension(self):
        return max((len(s) - 1 for s in self.faces), default=-1)

    def has_face(self, indices):
        return frozenset(indices) in self.faces

    def is_downward_closed(self):
        for s in self.faces:
            for v in s:
                if len(s) > 1 and (s - {v}) not in self.faces:
                    return False
        return True

    def to_json(self):
        return {
            "n_blocks": self.n_blocks,
            "faces": [sorted(s) for s in sorted(self.faces, key=lambda s: (len(s), sorted(s)))],
            "dropped_bounded_blocks": self.dropped,
            "inconclusive_tuples": [sorted(s) for s in self.inconclusive],
        }


def _block_spec(partition, i):
    expr = partition.block_expr(i)
    return expr if expr is not None else partition.block_mask(i)


def _block_is_bounded(partition, i, space, sweep):
    from .subsets import is_bounded

    expr = partition.block_expr(i)
    if expr is not None:
        return is_bounded(expr, space, sweep).is_bounded
    mask = partition.block_mask(i)
    dists = space.base_distances()
    member = dists[mask]
    if member.size == 0:
        return True
    return sweep.classify(space, int(member.max())) == BOUNDED


def build_closeness_complex(partition, space, sweep=None, dim_cap=None):
    """Query the tuple oracle over block subsets, smallest first.

    A subset containing an absent subset is absent without a query (the
    oracle respects faces); Inconclusive answers are conservatively treated
    as present and reported.
    """
    sweep = sweep or Sweep()
    live = [
        i
        for i in range(partition.n_blocks)
        if not _block_is_bounded(partition, i, space, sweep)
    ]
    dropped = [i for i in range(partition.n_blocks) if i not in live]
    if dim_cap is None:
        dim_cap = max(len(live) - 1, 0)

    faces = set()
    inconclusive = []
    provenance = {}
    for size in range(1, dim_cap + 2):
        for subset in itertools.combinations(live, size):
            s = frozenset(subset)
            if size > 1 and any(
                (s - {v}) not in faces for v in s
            ):
                continue  # an absent face rules out every coface
            verdict = is_cocontrolled_tuple(
                [_block_spec(partition, i) for i in subset], space, sweep
            )
            provenance[s] = verdict
            if verdict.is_inconclusive:
                faces.add(s)
                inconclusive.append(s)
            elif not verdict.is_cocontrolled:
                faces.add(s)

    return ClosenessComplex(
        n_blocks=partition.n_blocks,
        faces=faces,
        dropped=dropped,
        inconclusive=inconclusive,
        provenance=provenance,
        dim_cap=dim_cap,
    )


def simplicial_cochain_complex(complex_):
    """Integer coboundary matrices of the normalized closeness complex.

    Returns ``(diffs, dims)`` ready for the cohomology routines; the
    composite of consecutive differentials is verified to vanish.
    """
    if not complex_.is_downward_closed():
        raise ValueError("closeness complex is not downward closed")
    top = complex_.dimension
    if top < 0:
        return [], [0]
    simplices = {q: complex_.simplices(q) for q in range(top + 1)}
    dims = [len(simplices[q]) for q in range(top + 1)]
    diffs = []
    for q in range(top):
        rows = {s: i for i, s in enumerate(simplices[q + 1])}
        cols = {s: i for i, s in enumerate(simplices[q])}
        d = snf.zeros(len(rows), len(cols))
        for s, i in rows.items():
            for j in range(len(s)):
                face = s[:j] + s[j + 1 :]
                d[i][cols[face]] += (-1) ** j
        diffs.append(d)
    for q in range(len(diffs) - 1):
        if not snf.is_zero(snf.matmul(diffs[q + 1], diffs[q])):
            raise AssertionError("coboundary square is nonzero")
    return diffs, dims


def tuple_cochain_complex(complex_, max_len):
    """The unnormalized complex on block tuples with repeats, for validation.

    Degree-q cochains are functions on the present (q+1)-tuples (presence
    depends only on the support set); the differential deletes entries with
    alternating signs.  Used by tests to confirm the normalized reduction.
    """
    tuples_by_len = {}
    live = sorted({v for s in complex_.faces for v in s})
    for length in range(1, max_len + 1):
        tuples_by_len[length] = [
            t
            for t in itertools.product(live, repeat=length)
            if frozenset(t) in complex_.faces
        ]
    dims = [len(tuples_by_len[length]) for length in range(1, max_len + 1)]
    diffs = []
    for length in range(1, max_len):
        rows = {t: i for i, t in enumerate(tuples_by_len[length + 1])}
        cols = {t: i for i, t in enumerate(tuples_by_len[length])}
        d = snf.zeros(len(rows), len(cols))
        for t, i in rows.items():
            for j in range(len(t)):
                face = t[:j] + t[j + 1 :]
                if face in cols:
                    d[i][cols[face]] += (-1) ** j
        diffs.append(d)
    return diffs, dims


def coarse_cohomology_via_partition(
    partition, space, group, sweep=None, dim_cap=None, complex_out=None
):
    """Cohomology of the subset at this partition's resolution."""
    sweep = sweep or Sweep()
    complex_ = build_closeness_complex(partition, space, sweep, dim_cap)
    if complex_out is not None:
        complex_out.append(complex_)
    diffs, dims = simplicial_cochain_complex(complex_)
    max_degree = complex_.dim_cap
    result = cohomology_with_coefficients(
        diffs, group, max_degree=max_degree, dims=dims + [0] * (max_degree + 2 - len(dims))
    )
    result.route = "closeness+snf"
    if complex_.inconclusive:
        result.notes["inconclusive_tuples"] = [sorted(s) for s in complex_.inconclusive]
    if not complex_.faces:
        result.notes["degenerate"] = "all blocks bounded"
    return result


def refinement_stability(partition, other, space, group, sweep=None, dim_cap=None):
    """Compare cohomology at a partition and at a common refinement.

    The colimit over all partitions has no finite algorithmic form; one
    refinement step that leaves the answer unchanged is the practical
    stability proxy, and the report says which.
    """
    sweep = sweep or Sweep()
    coarse = coarse_cohomology_via_partition(partition, space, group, sweep, dim_cap)
    refined_partition, _ = partition.common_refinement(other)
    refined = coarse_cohomology_via_partition(
        refined_partition, space, group, sweep, dim_cap
    )
    degrees = sorted(set(coarse.factors) | set(refined.factors))
    stable = all(
        coarse.factors.get(q, []) == refined.factors.get(q, []) for q in degrees
    )
    return {
        "stable": stable,
        "at_partition": coarse.to_json(),
        "at_refinement": refined.to_json(),
    }
