"""Cohomology of integer cochain complexes with finite abelian coefficients.

The input is a list of integer coboundary matrices ``d_0, d_1, ...`` where
``d_q`` maps degree-``q`` cochains to degree-``q+1`` cochains (``d_q`` has
``dim C^{q+1}`` rows and ``dim C^q`` columns).  Two independent routes are
provided:

* :func:`cohomology_with_coefficients` diagonalizes the integer matrices and
  assembles ``H^q(C (x) A)`` with universal-coefficient bookkeeping, and
* :func:`brute_force_cohomology` literally enumerates cochains, kernels and
  images, deriving the group structure from element-order counts.

The two must agree; tests and the acceptance suite cross-validate them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

from . import snf
from .groups import FinAbGroup, invariant_factors


class NotAComplexError(ValueError):
    pass


class InstanceTooLargeError(ValueError):
    pass


@dataclass
class CohomologyResult:
    """Per-degree invariant factors of cohomology groups.

    ``factors[q]`` is the invariant-factor chain of ``H^q`` (empty = trivial).
    Degrees carrying an infinite direct sum of copies of the coefficient
    group (which arise in degree 0 for spaces with infinitely many ends) are
    listed in ``infinite_degrees`` instead of ``factors``.
    """

    factors: dict = field(default_factory=dict)
    infinite_degrees: set = field(default_factory=set)
    route: str = ""
    generators: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def group(self, q):
        return FinAbGroup(self.factors.get(q, []))

    def order(self, q):
        return self.group(q).order

    def is_trivial(self, q):
        return q not in self.infinite_degrees and not self.factors.get(q, [])

    def to_json(self):
        out = {str(q): list(f) for q, f in sorted(self.factors.items())}
        for q in sorted(self.infinite_degrees):
            out[str(q)] = "infinite direct sum"
        return out

    def same_groups(self, other):
        if self.infinite_degrees != other.infinite_degrees:
            return False
        degrees = set(self.factors) | set(other.factors)
        return all(
            tuple(self.factors.get(q, ())) == tuple(other.factors.get(q, ()))
            for q in degrees
        )


def complex_dimensions(diffs, dims=None):
    """Cochain dimensions implied by the matrix shapes.

    Empty matrices carry no shape, so callers working with complexes that
    have zero-dimensional levels can pass ``dims`` explicitly.
    """
    if dims is not None:
        if len(dims) < len(diffs) + 1:
            raise NotAComplexError("dims must cover every level of the complex")
        for q, d in enumerate(diffs):
            rows, cols = snf.shape(d)
            if (rows, cols) != (0, 0) and (rows, cols) != (dims[q + 1], dims[q]):
                raise NotAComplexError(f"d_{q} shape {(rows, cols)} != {(dims[q + 1], dims[q])}")
        return list(dims)
    dims = []
    for q, d in enumerate(diffs):
        rows, cols = snf.shape(d)
        if q == 0:
            dims.append(cols)
        elif rows == 0 and cols == 0:
            pass  # an empty matrix carries no column count
        elif dims[q] != cols:
            raise NotAComplexError(f"inconsistent dimension at degree {q}")
        dims.append(rows)
    return dims


def _check_complex(diffs):
    for q in range(len(diffs) - 1):
        rows_next, _ = snf.shape(diffs[q + 1])
        rows, cols = snf.shape(diffs[q])
        if rows and cols and rows_next:
            if not snf.is_zero(snf.matmul(diffs[q + 1], diffs[q])):
                raise NotAComplexError(f"d_{q + 1} . d_{q} != 0")


def cohomology_with_coefficients(diffs, group, max_degree=None, dims=None):
    """``H^q`` of the complex with coefficients in a finite abelian group.

    For a complex of free Z-modules, ``H^q(C (x) Z/m)`` is
    ``(Z/m)^{b_q} + (+)_j Z/gcd(d_j, m) + (+)_j Z/gcd(e_j, m)`` where ``b_q``
    is the free rank of the integral ``H^q``, the ``d_j`` are the elementary
    divisors of ``d_{q-1}`` (torsion of ``H^q``) and the ``e_j`` those of
    ``d_q`` (the Tor term contributed by ``H^{q+1}``).  General coefficients
    distribute over the invariant factors.
    """
    if not isinstance(group, FinAbGroup):
        group = FinAbGroup(group)
    dims = complex_dimensions(diffs, dims)
    _check_complex(diffs)
    top = len(dims) - 1 if max_degree is None else max_degree
    ranks = []
    divisors = []
    for d in diffs:
        rows, cols = snf.shape(d)
        if rows == 0 or cols == 0:
            ranks.append(0)
            divisors.append([])
            continue
        _, s, _ = snf.smith_normal_form(d)
        diag = [x for x in snf.diagonal(s) if x != 0]
        ranks.append(len(diag))
        divisors.append([x for x in diag if x > 1])

    def rank_at(q):
        return ranks[q] if 0 <= q < len(ranks) else 0

    def divisors_at(q):
        return divisors[q] if 0 <= q < len(divisors) else []

    result = CohomologyResult(route="snf")
    for q in range(top + 1):
        dim = dims[q] if q < len(dims) else 0
        free_rank = dim - rank_at(q) - rank_at(q - 1)
        if free_rank < 0:
            raise NotAComplexError(f"negative free rank at degree {q}")
        orders = []
        for m in group.factors:
            orders.extend([m] * free_rank)
            for d in divisors_at(q - 1):
                orders.append(gcd(d, m))
            for d in divisors_at(q):
                orders.append(gcd(d, m))
        result.factors[q] = list(invariant_factors(orders))
    return result


def _apply(diff, vec, group):
    rows, cols = snf.shape(diff)
    out = []
    for i in range(rows):
        acc = group.zero()
        row = diff[i]
        for j in range(cols):
            if row[j]:
                acc = group.add(acc, group.scale(row[j], vec[j]))
        out.append(acc)
    return tuple(out)


def _is_killed(g, n, add, zero):
    # n-fold sum of g by binary doubling
    acc = zero
    base = g
    while n:
        if n & 1:
            acc = add(acc, base)
        base = add(base, base)
        n >>= 1
    return acc == zero


def _factor_multiset(n):
    out = []
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _group_structure_from_elements(elements, add, zero):
    """Invariant factors of a finite abelian group given as raw elements.

    Works prime by prime: in a p-group ``(+) Z/p^{e_i}`` the number of
    elements killed by ``p^j`` is ``p^{sum_i min(j, e_i)}``, so the counting
    function pins down the exponent multiset exactly.
    """
    n = len(elements)
    if n == 1:
        return ()
    cyclic = []
    for p in sorted(set(_factor_multiset(n))):
        at_least = []  # at_least[j-1] = number of cyclic p-summands with exponent >= j
        prev_log = 0
        j = 0
        while True:
            j += 1
            killed = sum(1 for g in elements if _is_killed(g, p ** j, add, zero))
            log = 0
            while killed % p == 0:
                killed //= p
                log += 1
            if log == prev_log:
                break
            at_least.append(log - prev_log)
            prev_log = log
        for idx in range(len(at_least)):
            exactly = at_least[idx] - (at_least[idx + 1] if idx + 1 < len(at_least) else 0)
            cyclic.extend([p ** (idx + 1)] * exactly)
    return invariant_factors(cyclic)


def brute_force_cohomology(diffs, group, max_degree=None, cap=10 ** 6, dims=None):
    """Independent oracle: enumerate every cochain, kernel and image.

    Unusable beyond tiny complexes by design; the point is that it shares no
    code path with the Smith-form route.
    """
    if not isinstance(group, FinAbGroup):
        group = FinAbGroup(group)
    dims = complex_dimensions(diffs, dims)
    _check_complex(diffs)
    top = len(dims) - 1 if max_degree is None else max_degree
    if group.order > 1:
        # kernels enumerate C^0..C^top and images re-enumerate C^{q-1}
        worst = max(group.order ** d for d in dims[: top + 1])
        if worst > cap:
            raise InstanceTooLargeError(f"{worst} cochains exceeds cap {cap}")

    result = CohomologyResult(route="brute-force")
    for q in range(top + 1):
        dim = dims[q] if q < len(dims) else 0
        diff_out = diffs[q] if q < len(diffs) else snf.zeros(0, dim)
        zero_out = tuple(group.zero() for _ in range(len(diff_out)))
        kernel = [
            vec
            for vec in itertools.product(*(group.elements() for _ in range(dim)))
            if _apply(diff_out, vec, group) == zero_out
        ]
        if q == 0 or q - 1 >= len(diffs):
            image = {tuple(group.zero() for _ in range(dim))}
        else:
            image = {
                _apply(diffs[q - 1], vec, group)
                for vec in itertools.product(
                    *(group.elements() for _ in range(dims[q - 1]))
                )
            }

        def add(a, b):
            return tuple(group.add(x, y) for x, y in zip(a, b))

        def coset(g):
            # canonical representative: lexicographic minimum over the image
            return min(add(g, h) for h in image)

        cosets = sorted({coset(g) for g in kernel})
        factors = _group_structure_from_elements(
            cosets, lambda a, b: coset(add(a, b)), coset(tuple(group.zero() for _ in range(dim)))
        )
        result.factors[q] = list(factors)
    return result
