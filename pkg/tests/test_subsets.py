import random

import numpy as np
import pytest

from coarsecoh.spaces import LatticeBox, RootedTree, binary_tree, lattice_line
from coarsecoh.subsets import (
    All,
    Ball,
    Complement,
    Cone,
    Empty,
    FinitePointSet,
    HalfSpace,
    Intersection,
    Quadrant,
    Thicken,
    TreePrefix,
    Union,
    boxes,
    contains,
    is_bounded,
    member_points,
    membership_mask,
    parse_expr,
)
from coarsecoh.sweeps import BOUNDED, UNBOUNDED, Sweep


def test_halfspace_membership():
    z2 = LatticeBox(2, 8)
    h = HalfSpace(0, "+")
    assert contains(h, (3, -5), z2)
    assert not contains(h, (-1, 2), z2)


def test_complement_of_all_is_empty():
    z2 = LatticeBox(2, 4)
    mask = membership_mask(Complement(All()), z2)
    assert not mask.any()


def test_thicken_agrees_with_neighbor_definition():
    z2 = LatticeBox(2, 6)
    e = Ball((0, 0), 0)
    t = Thicken(e, 2)
    assert contains(t, (1, 1), z2)
    assert not contains(t, (2, 1), z2)
    # pointwise: member iff some member of e within distance 2
    mask_e = membership_mask(e, z2)
    mask_t = membership_mask(t, z2)
    pts = z2.points()
    members = [p for p, m in zip(pts, mask_e) if m]
    for p, m in zip(pts, mask_t):
        expected = any(z2.distance(p, q) <= 2 for q in members)
        assert bool(m) == expected


def test_thicken_monotone_in_scale():
    z2 = LatticeBox(2, 8)
    e = Union([Ball((2, 2), 1), HalfSpace(1, "-", -4)])
    small = membership_mask(Thicken(e, 1), z2)
    large = membership_mask(Thicken(e, 3), z2)
    assert not (small & ~large).any()


def test_de_morgan_pointwise():
    z2 = LatticeBox(2, 6)
    a = HalfSpace(0, "+")
    b = Ball((1, 1), 3)
    lhs = membership_mask(Complement(Union([a, b])), z2)
    rhs = membership_mask(Intersection([Complement(a), Complement(b)]), z2)
    assert (lhs == rhs).all()
    lhs = membership_mask(Complement(Intersection([a, b])), z2)
    rhs = membership_mask(Union([Complement(a), Complement(b)]), z2)
    assert (lhs == rhs).all()


def test_quadrant_and_cone():
    z2 = LatticeBox(2, 6)
    q = Quadrant("+-")
    assert contains(q, (3, -1), z2)
    assert not contains(q, (3, 0), z2)
    c = Cone("le", 1, 0)
    assert contains(c, (5, -5), z2)
    assert not contains(c, (2, 3), z2)


def test_tree_prefix():
    t = binary_tree(4)
    e = TreePrefix((0,))
    assert contains(e, (0, 1, 1), t)
    assert contains(e, (0,), t)
    assert not contains(e, (1, 0), t)


def test_bounded_ball():
    z2 = LatticeBox(2, 32)
    cert = is_bounded(Ball((0, 0), 5), z2)
    assert cert.verdict == BOUNDED
    assert cert.bound == 5


def test_unbounded_halfspace_with_witnesses():
    z2 = LatticeBox(2, 32)
    cert = is_bounded(HalfSpace(0, "+"), z2)
    assert cert.verdict == UNBOUNDED
    assert cert.witnesses
    assert all(w[0] >= 0 for w in cert.witnesses)


def test_thickened_opposite_quadrants_bounded():
    z2 = LatticeBox(2, 32)
    a0 = Quadrant("++")
    a2 = Quadrant("--")
    inter = Intersection([Thicken(a0, 3), Thicken(a2, 3)])
    cert = is_bounded(inter, z2, Sweep(scales=(1, 2, 4)))
    assert cert.verdict == BOUNDED
    assert cert.bound <= 6


def test_boundedness_monotone_under_inclusion():
    z2 = LatticeBox(2, 32)
    big = Ball((0, 0), 9)
    small = Intersection([big, HalfSpace(0, "+")])
    cb = is_bounded(big, z2)
    cs = is_bounded(small, z2)
    assert cb.verdict == BOUNDED and cs.verdict == BOUNDED
    assert cs.bound <= cb.bound


def test_box_route_matches_scan_on_small_windows():
    z2 = LatticeBox(2, 10)
    exprs = [
        HalfSpace(0, "+"),
        Quadrant("-+"),
        Intersection([HalfSpace(0, "+"), HalfSpace(1, "-")]),
        Complement(HalfSpace(0, "+")),
        Union([Quadrant("++"), Quadrant("--")]),
        Thicken(HalfSpace(0, "-"), 2),
        Intersection([Thicken(HalfSpace(0, "+"), 2), Thicken(HalfSpace(0, "-"), 2)]),
    ]
    from coarsecoh.subsets import box_distance

    for expr in exprs:
        blist = boxes(expr, z2)
        assert blist is not None, expr.to_text()
        mask = membership_mask(expr, z2)
        for p, m in zip(z2.points(), mask):
            in_boxes = any(box_distance(p, b, z2.metric) == 0 for b in blist)
            assert in_boxes == bool(m), (expr.to_text(), p)


def test_l1_thicken_of_corner_not_boxed():
    z2 = LatticeBox(2, 8)
    assert boxes(Thicken(Quadrant("++"), 2), z2) is None
    linf = LatticeBox(2, 8, metric="linf")
    assert boxes(Thicken(Quadrant("++"), 2), linf) is not None


def test_parse_round_trip():
    texts = [
        "all",
        "empty",
        "halfspace(axis=0,sign=+)",
        "halfspace(axis=1,sign=-,offset=3)",
        "quadrant(+,-)",
        "cone(le,|x1|,|x0|)",
        "ball((0 0),5)",
        "points((1 2),(3 4))",
        "treeprefix((0 1))",
        "not(halfspace(axis=0,sign=+))",
        "and(quadrant(+,+),ball((0 0),8))",
        "or(halfspace(axis=0,sign=+),halfspace(axis=0,sign=-))",
        "thicken(ball((0 0),0),2)",
    ]
    for text in texts:
        assert parse_expr(text).to_text() == text


def test_parse_with_names():
    names = {"left": HalfSpace(0, "-")}
    expr = parse_expr("not(left)", names)
    assert expr.to_text() == "not(halfspace(axis=0,sign=-))"


def test_parse_rejects_junk():
    with pytest.raises(ValueError):
        parse_expr("frobnicate(1)")
    with pytest.raises(ValueError):
        parse_expr("all extra")
