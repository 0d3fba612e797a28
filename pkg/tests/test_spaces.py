import random

import pytest

from coarsecoh.spaces import (
    AsymptoticProduct,
    ExplicitFinite,
    LatticeBox,
    PointOutsideWindowError,
    ProductWithLine,
    ProductWithRay,
    RootedTree,
    Subspace,
    binary_tree,
    half_line,
    lattice_line,
)
from coarsecoh.subsets import Ball, Intersection, Quadrant, parse_expr


def test_lattice_manhattan_distance():
    z2 = LatticeBox(2, 10)
    assert z2.distance((0, 0), (3, 4)) == 7
    assert z2.distance((3, 4), (3, 4)) == 0


def test_lattice_linf_distance():
    z2 = LatticeBox(2, 10, metric="linf")
    assert z2.distance((0, 0), (3, 4)) == 4


def test_window_counts():
    assert len(lattice_line(3)) == 7
    assert len(LatticeBox(2, 3)) == 49
    assert len(binary_tree(3)) == 15
    assert len(ExplicitFinite([[0, 1], [1, 0]])) == 2


def test_lattice_ball():
    z = lattice_line(10)
    assert z.ball((0,), 2) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert z.ball((0,), 0) == [(0,)]
    z2 = LatticeBox(2, 10, metric="linf")
    assert len(z2.ball((0, 0), 1)) == 9


def test_ball_monotone_in_radius():
    z2 = LatticeBox(2, 8)
    small = set(z2.ball((1, 2), 2))
    assert small <= set(z2.ball((1, 2), 5))


def test_tree_distance_matches_brute_force_paths():
    t = binary_tree(3)
    # deepest common ancestor at depth 1 for two depth-3 leaves
    assert t.distance((0, 0, 0), (0, 1, 1)) == 4
    assert t.distance((), (1, 0)) == 2
    assert t.distance((0,), (1,)) == 2
    # spot-check the vectorized distance matrix against the pairwise rule
    m = t.distance_matrix()
    pts = t.points()
    rng = random.Random(7)
    for _ in range(50):
        i, j = rng.randrange(len(pts)), rng.randrange(len(pts))
        assert m[i, j] == t.distance(pts[i], pts[j])


def test_triangle_inequality_sampled():
    spaces = [LatticeBox(2, 6), binary_tree(4), AsymptoticProduct(lattice_line(6))]
    rng = random.Random(11)
    for space in spaces:
        pts = space.points()
        for _ in range(100):
            p, q, r = (pts[rng.randrange(len(pts))] for _ in range(3))
            assert space.distance(p, r) <= space.distance(p, q) + space.distance(q, r)
            assert space.distance(p, q) == space.distance(q, p)
            assert (space.distance(p, q) == 0) == (p == q)


def test_asymptotic_product_pullback_condition():
    x = lattice_line(8)
    xi = AsymptoticProduct(x)
    for (p, (s, t)) in xi.points():
        assert s + t == x.distance(x.basepoint, p)
        assert s >= 0 and t >= 0
    assert xi.distance((xi.basepoint), (xi.basepoint)) == 0
    # d((x, i), basepoint) = 2 d(x, x0): both factors contribute equally
    for (p, (s, t)) in xi.points():
        assert xi.distance((p, (s, t)), xi.basepoint) == x.distance(
            x.basepoint, p
        ) + s + t


def test_asymptotic_product_of_ray_slice_counts():
    ray = half_line(8)
    prod = AsymptoticProduct(ray)
    for r in range(9):
        slice_points = [
            p for p in prod.points() if ray.distance(ray.basepoint, p[0]) == r
        ]
        assert len(slice_points) == r + 1


def test_point_outside_window_rejected():
    z = lattice_line(3)
    with pytest.raises(PointOutsideWindowError):
        z.ball((5,), 1)


def test_products():
    pr = ProductWithRay(lattice_line(4), 4)
    assert pr.distance(((0,), 0), ((2,), 3)) == 5
    pl = ProductWithLine(lattice_line(4), 4)
    assert pl.distance(((0,), -2), ((1,), 2)) == 5
    assert len(pr) == 9 * 5
    assert len(pl) == 9 * 9


def test_subspace_inherits_metric():
    z2 = LatticeBox(2, 8)
    quadrant = Subspace(z2, Quadrant("++"))
    assert quadrant.basepoint == (0, 0)
    assert quadrant.distance((0, 1), (3, 0)) == 4
    assert all(x >= 0 and y >= 0 for (x, y) in quadrant.points())


def test_first_quadrant_triangle_window():
    z2 = LatticeBox(2, 8)
    tri = Subspace(z2, Intersection([Quadrant("++"), Ball((0, 0), 8)]))
    assert len(tri) == 9 * 10 // 2
    assert tri.window_radius == 8


def test_pairs_within_matches_distance():
    for space in [LatticeBox(2, 5), binary_tree(4)]:
        pts = space.points()
        pairs = {tuple(p) for p in space.pairs_within(2)}
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                assert ((i, j) in pairs) == (space.distance(pts[i], pts[j]) <= 2)
