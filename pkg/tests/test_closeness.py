import pytest

from coarsecoh.closeness import (
    build_closeness_complex,
    coarse_cohomology_via_partition,
    refinement_stability,
    simplicial_cochain_complex,
    tuple_cochain_complex,
)
from coarsecoh.cohomology import brute_force_cohomology, cohomology_with_coefficients
from coarsecoh.groups import FinAbGroup
from coarsecoh.partitions import Partition
from coarsecoh.spaces import LatticeBox, binary_tree, lattice_line
from coarsecoh.subsets import All, HalfSpace, Intersection, Quadrant, TreePrefix
from coarsecoh.sweeps import Sweep

SWEEP = Sweep(scales=(1, 2, 4))

QUADRANTS = [Quadrant("++"), Quadrant("+-"), Quadrant("--"), Quadrant("-+")]


def quadrant_partition(radius=32):
    z2 = LatticeBox(2, radius)
    return Partition.from_exprs(z2, QUADRANTS), z2


def line_partition(radius=32):
    z = lattice_line(radius)
    return Partition.from_exprs(z, [HalfSpace(0, "+"), HalfSpace(0, "-")]), z


def test_quadrant_complex_is_the_four_cycle():
    partition, z2 = quadrant_partition()
    k = build_closeness_complex(partition, z2, SWEEP)
    assert sorted(tuple(s) for s in k.vertices()) == [(0,), (1,), (2,), (3,)]
    assert k.simplices(1) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert k.simplices(2) == []
    assert k.is_downward_closed()


def test_single_unbounded_block():
    z = lattice_line(32)
    partition = Partition.from_exprs(z, [All()])
    k = build_closeness_complex(partition, z, SWEEP)
    assert k.faces == {frozenset([0])}


def test_line_split_gives_two_isolated_vertices():
    partition, z = line_partition()
    k = build_closeness_complex(partition, z, SWEEP)
    assert k.simplices(0) == [(0,), (1,)]
    assert k.simplices(1) == []


def test_four_cycle_cohomology_over_z3():
    partition, z2 = quadrant_partition()
    res = coarse_cohomology_via_partition(partition, z2, FinAbGroup([3]), SWEEP)
    assert res.factors[0] == [3]
    assert res.factors[1] == [3]
    assert res.factors.get(2, []) == []


def test_line_cohomology_over_z2():
    partition, z = line_partition()
    res = coarse_cohomology_via_partition(partition, z, FinAbGroup([2]), SWEEP)
    assert res.factors[0] == [2, 2]
    assert res.factors.get(1, []) == []


def test_bounded_blocks_are_dropped():
    z = lattice_line(32)
    from coarsecoh.subsets import Ball, Complement, Intersection

    middle = Ball((0,), 5)
    left = Intersection([HalfSpace(0, "-", -5)])
    right = Intersection([HalfSpace(0, "+", 6)])
    partition = Partition.from_exprs(z, [left, middle, right])
    k = build_closeness_complex(partition, z, SWEEP)
    assert k.dropped == [1]
    res = coarse_cohomology_via_partition(partition, z, FinAbGroup([2]), SWEEP)
    assert res.factors[0] == [2, 2]


def test_tree_prefix_partition_star():
    tree = binary_tree(10)
    from coarsecoh.subsets import Complement, Union

    sweep = Sweep(scales=(1, 2))  # close pairs across branches sit near the root
    left = TreePrefix((0,))
    right = TreePrefix((1,))
    root = Complement(Union([left, right]))  # just the root point
    partition = Partition.from_exprs(tree, [left, right, root])
    k = build_closeness_complex(partition, tree, sweep)
    assert k.dropped == [2]
    # two branches meet only near the root: no edge
    assert k.simplices(1) == []
    res = coarse_cohomology_via_partition(partition, tree, FinAbGroup([3]), sweep)
    assert res.factors[0] == [3, 3]
    assert res.factors.get(1, []) == []


def test_normalized_equals_tuple_complex_on_small_instances():
    """The blocky complex on all tuples (with repeats) is reduced to the
    normalized ordered complex; brute force confirms the reduction."""
    partition, z = line_partition()
    k = build_closeness_complex(partition, z, SWEEP)
    norm_diffs, norm_dims = simplicial_cochain_complex(k)
    for m in ([2], [3]):
        a = cohomology_with_coefficients(
            norm_diffs, FinAbGroup(m), max_degree=2, dims=norm_dims + [0, 0, 0]
        )
        tup_diffs, tup_dims = tuple_cochain_complex(k, 4)
        b = brute_force_cohomology(
            tup_diffs, FinAbGroup(m), max_degree=2, dims=tup_dims
        )
        for q in range(3):
            assert a.factors.get(q, []) == b.factors.get(q, []), (m, q)


def test_interval_blocks_of_line_have_bounded_interfaces():
    # interiors of interval blocks never come close far out, so a bounded
    # middle interval drops and the two rays stay disconnected
    z = lattice_line(48)
    left = HalfSpace(0, "-", -8)
    middle = Intersection([HalfSpace(0, "+", -8), HalfSpace(0, "-", 9)])
    right = HalfSpace(0, "+", 9)
    partition = Partition.from_exprs(z, [left, middle, right])
    k = build_closeness_complex(partition, z, SWEEP)
    assert k.dropped == [1]
    assert k.simplices(1) == []


def test_normalized_equals_tuple_complex_three_blocks():
    # angular sectors of the upper half-plane diverge pairwise except along
    # their shared rays: a genuine path graph on three blocks
    from coarsecoh.subsets import Cone

    z2 = LatticeBox(2, 32)
    upper = HalfSpace(1, "+")
    left = Intersection([upper, HalfSpace(0, "-"), Cone("ge", 0, 1)])
    middle = Intersection([upper, Cone("lt", 0, 1)])
    right = Intersection([upper, HalfSpace(0, "+"), Cone("ge", 0, 1)])
    partition = Partition.from_exprs(
        z2, [left, middle, right], universe=upper
    )
    k = build_closeness_complex(partition, z2, SWEEP)
    assert k.simplices(1) == [(0, 1), (1, 2)]
    assert k.simplices(2) == []
    norm_diffs, norm_dims = simplicial_cochain_complex(k)
    a = cohomology_with_coefficients(
        norm_diffs, FinAbGroup([2]), max_degree=1, dims=norm_dims + [0] * 3
    )
    tup_diffs, tup_dims = tuple_cochain_complex(k, 3)
    b = brute_force_cohomology(tup_diffs, FinAbGroup([2]), max_degree=1, dims=tup_dims)
    for q in range(2):
        assert a.factors.get(q, []) == b.factors.get(q, []), q
    assert a.factors[0] == [2]
    assert a.factors[1] == []


def test_normalized_equals_tuple_complex_full_simplex():
    # residue classes mod 3 are pairwise and triply close everywhere
    z = lattice_line(48)
    from coarsecoh.partitions import Partition as P
    import numpy as np

    labels = np.array([p[0] % 3 for p in z.points()], dtype=np.int64)
    partition = P.from_labels(z, labels)
    k = build_closeness_complex(partition, z, SWEEP)
    assert k.has_face([0, 1, 2])
    norm_diffs, norm_dims = simplicial_cochain_complex(k)
    a = cohomology_with_coefficients(
        norm_diffs, FinAbGroup([2]), max_degree=1, dims=norm_dims + [0] * 3
    )
    tup_diffs, tup_dims = tuple_cochain_complex(k, 3)
    b = brute_force_cohomology(tup_diffs, FinAbGroup([2]), max_degree=1, dims=tup_dims)
    for q in range(2):
        assert a.factors.get(q, []) == b.factors.get(q, []), q
    assert a.factors[0] == [2]


def test_refinement_stability_on_line():
    z = lattice_line(48)
    p1 = Partition.from_exprs(z, [HalfSpace(0, "+"), HalfSpace(0, "-")])
    p2 = Partition.from_exprs(
        z,
        [
            HalfSpace(0, "-", -10),
            Intersection([HalfSpace(0, "+", -10), HalfSpace(0, "-", 11)]),
            HalfSpace(0, "+", 11),
        ],
    )
    report = refinement_stability(p1, p2, z, FinAbGroup([2]), SWEEP)
    assert report["stable"]


def test_small_window_scan_is_conservative():
    # the scan route on a starved window may only ADD faces relative to the
    # exact symbolic complex, and has to audit what it could not settle
    import numpy as np

    z2_small = LatticeBox(2, 8)
    partition_small = Partition.from_labels(
        z2_small,
        np.array(
            [
                0 if x >= 0 and y >= 0 else 1 if x >= 0 else 2 if y < 0 else 3
                for (x, y) in z2_small.points()
            ],
            dtype=np.int64,
        ),
    )
    k_small = build_closeness_complex(partition_small, z2_small, Sweep(scales=(1, 2, 4)))
    partition_true, z2 = quadrant_partition()
    k_true = build_closeness_complex(partition_true, z2, SWEEP)
    assert k_true.faces <= k_small.faces
    for s in k_small.inconclusive:
        assert s in k_small.faces
