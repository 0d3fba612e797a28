"""Exact integer matrix algebra and Smith normal form.

Matrices are plain lists of lists of Python ints.  Arbitrary precision is
non-negotiable here: the reduction can blow intermediate entries up far past
64 bits even on small inputs, which is why none of this runs through numpy.
"""

from __future__ import annotations


def zeros(rows, cols):
    return [[0] * cols for _ in range(rows)]


def identity(n):
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = 1
    return m


def shape(m):
    return (len(m), len(m[0]) if m else 0)


def matmul(a, b):
    ra, ca = shape(a)
    rb, cb = shape(b)
    if ca != rb:
        raise ValueError(f"shape mismatch {shape(a)} x {shape(b)}")
    out = zeros(ra, cb)
    for i in range(ra):
        arow = a[i]
        orow = out[i]
        for k in range(ca):
            aik = arow[k]
            if aik:
                brow = b[k]
                for j in range(cb):
                    orow[j] += aik * brow[j]
    return out


def copy(m):
    return [row[:] for row in m]


def is_zero(m):
    return all(x == 0 for row in m for x in row)


def determinant(m):
    """Determinant by fraction-free Gaussian elimination (Bareiss)."""
    n, c = shape(m)
    if n != c:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = copy(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m):
    """Diagonalize an integer matrix by unimodular row and column operations.

    Returns ``(u, s, v)`` with ``u @ m @ v == s``, ``s`` diagonal with
    ``s[0][0] | s[1][1] | ...`` nonnegative, and ``det(u), det(v) = +-1``.

    Pivoting picks the smallest-magnitude nonzero entry of the remaining
    block, which keeps intermediate growth tame on the matrices we meet.

    >>> u, s, v = smith_normal_form([[2, 0], [0, 3]])
    >>> [s[0][0], s[1][1]]
    [1, 6]
    """
    rows, cols = shape(m)
    s = copy(m)
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        if i != j:
            s[i], s[j] = s[j], s[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in s:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):
        # row[dst] += q * row[src]
        srow, drow = s[src], s[dst]
        for j in range(cols):
            drow[j] += q * srow[j]
        srow, drow = u[src], u[dst]
        for j in range(rows):
            drow[j] += q * srow[j]

    def add_col(src, dst, q):
        for row in s:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def negate_row(i):
        s[i] = [-x for x in s[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    limit = min(rows, cols)
    while t < limit:
        # locate smallest-magnitude nonzero pivot in the trailing block
        pivot = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = s[i][j]
                if x and (best is None or abs(x) < best):
                    best = abs(x)
                    pivot = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        dirty = False
        for i in range(t + 1, rows):
            if s[i][t]:
                q = -(s[i][t] // s[t][t])
                add_row(t, i, q)
                if s[i][t]:
                    dirty = True
        for j in range(t + 1, cols):
            if s[t][j]:
                q = -(s[t][j] // s[t][t])
                add_col(t, j, q)
                if s[t][j]:
                    dirty = True
        if dirty:
            continue  # remainder left behind, re-pivot on the smaller entry
        # pivot must divide the rest of the block to earn the divisibility chain
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if s[i][j] % s[t][t]:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, t, 1)
            continue
        if s[t][t] < 0:
            negate_row(t)
        t += 1

    return u, s, v


def diagonal(s):
    rows, cols = shape(s)
    return [s[i][i] for i in range(min(rows, cols))]


def elementary_divisors(m):
    """Nontrivial diagonal entries of the Smith form (each ``>= 2`` or ``0``-free)."""
    _, s, _ = smith_normal_form(m)
    return [d for d in diagonal(s) if d not in (0, 1)]


def rank(m):
    _, s, _ = smith_normal_form(m)
    return sum(1 for d in diagonal(s) if d != 0)


def verify_snf(m, u, s, v):
    """Re-multiplication check: ``u m v == s`` and both transforms unimodular."""
    if matmul(matmul(u, m), v) != s:
        return False
    return determinant(u) in (1, -1) and determinant(v) in (1, -1)
