"""Rational row reduction for small integer matrices; a test-only oracle.

Matrices are lists of rows of Fraction. Nothing here touches numpy so that
the answers owe nothing to the floating-point pipeline.
"""
from fractions import Fraction


def as_fractions(rows):
    return [[Fraction(int(x)) for x in row] for row in rows]


def matmul(a, b):
    cols = len(b[0]) if b else 0
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(cols)]
            for i in range(len(a))]


def rref(m):
    """Reduced row echelon form and the pivot columns."""
    a = [row[:] for row in m]
    rows, cols = len(a), len(a[0]) if a else 0
    pivots, r = [], 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        lead = a[r][c]
        a[r] = [x / lead for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m):
    return len(rref(m)[1]) if m and m[0] else 0


def column_basis(m):
    """Pivot columns of m, as a list of column vectors."""
    if not m or not m[0]:
        return []
    _, piv = rref(m)
    return [[row[c] for row in m] for c in piv]


def null_basis(m):
    cols = len(m[0])
    red, piv = rref(m)
    free = [c for c in range(cols) if c not in piv]
    out = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -red[i][f]
        out.append(v)
    return out


def lift_identity(count, m):
    """I_count ⊗ m."""
    r, c = len(m), len(m[0])
    out = [[Fraction(0)] * (count * c) for _ in range(count * r)]
    for b in range(count):
        for i in range(r):
            for j in range(c):
                out[b * r + i][b * c + j] = m[i][j]
    return out


def span_dim(vectors, ambient):
    if not vectors:
        return 0
    return rank([[v[i] for v in vectors] for i in range(ambient)])


def generalized_range(v, n):
    """Basis of the intersection of R(Ṽ_k); ranges are nested and stabilize once ranks repeat."""
    power = v
    basis = column_basis(power)
    while True:
        power = matmul(v, lift_identity(n, power))
        nxt = column_basis(power)
        if len(nxt) == len(basis):
            return basis
        basis = nxt


def contained(small, big, ambient):
    """span(small) ⊆ span(big)."""
    return span_dim(big + small, ambient) == span_dim(big, ambient)


def tensor_span(count, vectors, h):
    """Basis of C^count ⊗ span(vectors) in i-major coordinates."""
    out = []
    for b in range(count):
        for v in vectors:
            e = [Fraction(0)] * (count * h)
            e[b * h:(b + 1) * h] = v
            out.append(e)
    return out
