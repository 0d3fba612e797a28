import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsecoh.groups import FinAbGroup, invariant_factors


def test_invariant_factor_normalization():
    assert invariant_factors([2, 3]) == (6,)
    assert invariant_factors([4, 2]) == (2, 4)
    assert invariant_factors([2, 2, 3]) == (2, 6)
    assert invariant_factors([12, 60]) == (12, 60)
    assert invariant_factors([]) == ()
    assert invariant_factors([1]) == ()


def test_order_and_arithmetic():
    A = FinAbGroup([2, 4])
    assert A.order == 8
    assert A.add((1, 3), (1, 2)) == (0, 1)
    assert A.neg((1, 3)) == (1, 1)
    assert A.sub((0, 1), (1, 3)) == (1, 2)
    assert A.scale(3, (1, 2)) == (1, 2)
    assert len(list(A.elements())) == 8


def test_ring_structure():
    A = FinAbGroup([6])
    assert A.mul((4,), (5,)) == (2,)
    assert A.one() == (1,)
    B = FinAbGroup([2, 4])
    assert B.mul(B.one(), (1, 3)) == (1, 3)


def test_power_and_direct_sum():
    A = FinAbGroup([2])
    assert A.power(2).factors == (2, 2)
    assert A.direct_sum(FinAbGroup([3])).factors == (6,)


def test_element_order():
    A = FinAbGroup([2, 4])
    assert A.element_order((0, 0)) == 1
    assert A.element_order((1, 0)) == 2
    assert A.element_order((1, 1)) == 4


group_strategy = st.sampled_from(
    [FinAbGroup([2]), FinAbGroup([3]), FinAbGroup([4]), FinAbGroup([2, 4]), FinAbGroup([2, 2])]
)


@settings(max_examples=50, deadline=None)
@given(group_strategy, st.integers(0, 10 ** 6))
def test_group_laws(A, seed):
    rng = random.Random(seed)
    a, b, c = A.random(rng), A.random(rng), A.random(rng)
    assert A.add(a, b) == A.add(b, a)
    assert A.add(A.add(a, b), c) == A.add(a, A.add(b, c))
    assert A.add(a, A.zero()) == a
    assert A.add(a, A.neg(a)) == A.zero()
    assert A.mul(a, b) == A.mul(b, a)
    assert A.mul(a, A.add(b, c)) == A.add(A.mul(a, b), A.mul(a, c))
