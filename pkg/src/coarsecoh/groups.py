"""Finite abelian coefficient groups in invariant-factor form.

A group is stored as a chain of invariant factors ``m_1 | m_2 | ... | m_k``
(each ``>= 2``); the trivial group has an empty chain.  Elements are plain
tuples of residues ``(a_1 mod m_1, ..., a_k mod m_k)``, so they can be used
as dict keys and packed into numpy arrays without wrapping.
"""

from __future__ import annotations

import itertools
from math import prod


def _factorint(n):
    """Prime factorization ``{p: e}`` by trial division (inputs are small)."""
    result = {}
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            result[p] = e
        p += 1
    if n > 1:
        result[n] = 1
    return result


def invariant_factors(cyclic_orders):
    """Normalize a list of cyclic orders into an invariant-factor chain.

    >>> invariant_factors([2, 3])
    (6,)
    >>> invariant_factors([4, 2])
    (2, 4)
    >>> invariant_factors([2, 2, 3])
    (2, 6)
    >>> invariant_factors([1, 1])
    ()
    """
    exponents = {}
    for m in cyclic_orders:
        if m < 1:
            raise ValueError(f"cyclic order must be >= 1, got {m}")
        for p, e in _factorint(m).items():
            exponents.setdefault(p, []).append(e)
    if not exponents:
        return ()
    for exps in exponents.values():
        exps.sort(reverse=True)
    k = max(len(exps) for exps in exponents.values())
    factors = []
    for i in range(k):
        m = prod(p ** exps[i] for p, exps in exponents.items() if i < len(exps))
        factors.append(m)
    factors.reverse()
    return tuple(factors)


class FinAbGroup:
    """A finite abelian group ``Z/m_1 + ... + Z/m_k`` with ``m_1 | ... | m_k``.

    Also a commutative ring under componentwise multiplication, which is what
    the cup product needs.

    >>> A = FinAbGroup([3])
    >>> A.add((2,), (2,))
    (1,)
    >>> FinAbGroup([2, 4]).order
    8
    """

    __slots__ = ("factors",)

    def __init__(self, cyclic_orders):
        self.factors = invariant_factors(cyclic_orders)

    @property
    def order(self):
        return prod(self.factors)

    @property
    def rank(self):
        return len(self.factors)

    @property
    def is_trivial(self):
        return not self.factors

    def zero(self):
        return (0,) * len(self.factors)

    def one(self):
        return tuple(1 % m for m in self.factors)

    def reduce(self, vec):
        return tuple(a % m for a, m in zip(vec, self.factors))

    def add(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.factors))

    def sub(self, a, b):
        return tuple((x - y) % m for x, y, m in zip(a, b, self.factors))

    def neg(self, a):
        return tuple((-x) % m for x, m in zip(a, self.factors))

    def scale(self, n, a):
        return tuple((n * x) % m for x, m in zip(a, self.factors))

    def mul(self, a, b):
        return tuple((x * y) % m for x, y, m in zip(a, b, self.factors))

    def elements(self):
        """All elements in lexicographic order."""
        return itertools.product(*(range(m) for m in self.factors))

    def random(self, rng):
        return tuple(rng.randrange(m) for m in self.factors)

    def element_order(self, a):
        n = 1
        cur = a
        while any(cur):
            cur = self.add(cur, a)
            n += 1
        return n

    def direct_sum(self, other):
        return FinAbGroup(list(self.factors) + list(other.factors))

    def power(self, k):
        """The direct sum of ``k`` copies of this group."""
        return FinAbGroup(list(self.factors) * k)

    def __eq__(self, other):
        return isinstance(other, FinAbGroup) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        if not self.factors:
            return "FinAbGroup(trivial)"
        return "FinAbGroup(%s)" % " + ".join(f"Z/{m}" for m in self.factors)

    def describe(self):
        if not self.factors:
            return "0"
        return " + ".join(f"Z/{m}" for m in self.factors)
