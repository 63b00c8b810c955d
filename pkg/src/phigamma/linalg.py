"""Small exact linear algebra over any field whose elements support the
arithmetic operators and truthiness (``bool(x)`` is False only for zero).

Matrices are lists of rows.  Used with ``Fraction`` for the filtered-module
side and with ``CyclotomicElement`` for the lattice checks.
"""
from __future__ import annotations

from fractions import Fraction


def identity(n, one=Fraction(1), zero=Fraction(0)):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(r, c, zero=Fraction(0)):
    return [[zero] * c for _ in range(r)]


def transpose(a):
    return [list(col) for col in zip(*a)] if a else []


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new = []
        for j in range(cols):
            acc = row[0] * b[0][j] if inner else 0
            for k in range(1, inner):
                acc = acc + row[k] * b[k][j]
            new.append(acc)
        out.append(new)
    return out


def matvec(a, v):
    return [sum((row[k] * v[k] for k in range(1, len(v))), row[0] * v[0]) for row in a]


def madd(a, b):
    return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]


def msub(a, b):
    return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]


def mscale(a, c):
    return [[c * x for x in r] for r in a]


def columns(a):
    return transpose(a)


def from_columns(cols):
    return transpose(cols)


def rref(a):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c] if isinstance(m[r][c], (int, Fraction)) else m[r][c].inverse()
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a):
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def nullspace(a, ncols=None, one=Fraction(1), zero=Fraction(0)):
    """Basis of {v : a v = 0} as a list of vectors."""
    if not a:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    cols = len(a[0])
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [zero] * cols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][f]
        basis.append(v)
    return basis


def inverse(a):
    n = len(a)
    one = a[0][0] * 0 + 1
    zero = a[0][0] * 0
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(a)]
    m, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def det(a):
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = [list(r) for r in a]
    sign = 1
    result = None
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return m[0][0] * 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        result = m[c][c] if result is None else result * m[c][c]
        inv = 1 / m[c][c] if isinstance(m[c][c], (int, Fraction)) else m[c][c].inverse()
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return result if sign == 1 else -result


def solve(a, b):
    """Solve a x = b for a square invertible a (b a vector)."""
    return matvec(inverse(a), b)


def column_span_basis(cols):
    """Independent subset-free basis (rref rows) of the span of column vectors."""
    if not cols:
        return []
    m, pivots = rref([list(c) for c in cols])
    return [m[i] for i in range(len(pivots))]


def span_dim(cols):
    return rank([list(c) for c in cols]) if cols else 0


def in_span(v, cols):
    return span_dim(list(cols) + [v]) == span_dim(cols)


def intersect(cols_a, cols_b, dim):
    """Basis of span(a) ∩ span(b) inside Q^dim."""
    if not cols_a or not cols_b:
        return []
    # solve sum x_i a_i - sum y_j b_j = 0
    mat = [[c[r] for c in cols_a] + [-c[r] for c in cols_b] for r in range(dim)]
    ker = nullspace(mat)
    out = []
    for v in ker:
        w = [sum((v[i] * cols_a[i][r] for i in range(len(cols_a))), Fraction(0)) for r in range(dim)]
        out.append(w)
    return column_span_basis(out)


def complete_basis(cols, dim):
    """Extend independent vectors to a basis of Q^dim with standard vectors."""
    out = [list(c) for c in cols]
    for i in range(dim):
        e = [Fraction(int(i == j)) for j in range(dim)]
        if not in_span(e, out):
            out.append(e)
    return out


def det_expand(a):
    """Determinant by cofactor expansion; only needs ring operations (small sizes)."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det_expand(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def adjugate(a):
    n = len(a)
    if n == 1:
        return [[a[0][0] * 0 + 1]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(a) if k != i]
            c = det_expand(minor)
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return out
