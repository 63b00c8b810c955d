"""Dense univariate polynomials over Q as lists of Fractions (index = degree).

Only what the rest of the package needs: products, Euclidean division,
Bezout coefficients and substitution.  Lists are always trimmed so that the
zero polynomial is ``[]``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

Poly = list


def trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def const(c):
    return trim([Fraction(c)])


def add(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a, b):
    return add(a, scale(b, -1))


def scale(a, c):
    c = Fraction(c)
    return trim([c * x for x in a])


def mul(a, b, maxdeg=None):
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if maxdeg is not None:
        n = min(n, maxdeg + 1)
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        if x == 0 or i >= n:
            continue
        for j in range(min(len(b), n - i)):
            out[i + j] += x * b[j]
    return trim(out)


def power(a, e, maxdeg=None):
    result = [Fraction(1)]
    base = a
    while e:
        if e & 1:
            result = mul(result, base, maxdeg)
        e >>= 1
        if e:
            base = mul(base, base, maxdeg)
    return result


def divmod_(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] -= c * y
        a = trim(a)
    return trim(q), a


def mod(a, b):
    return divmod_(a, b)[1]


def gcdex(a, b):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = trim(a), trim(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = divmod_(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(s0, mul(q, s1))
        t0, t1 = t1, sub(t0, mul(q, t1))
    if not r0:
        return [], [], []
    lc = r0[-1]
    return scale(r0, 1 / lc), scale(s0, 1 / lc), scale(t0, 1 / lc)


def inverse_mod(a, m):
    g, s, _ = gcdex(a, m)
    if g != [1]:
        raise ZeroDivisionError("not invertible modulo the given polynomial")
    return mod(s, m)


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def compose(a, b, maxdeg=None):
    """a(b(X)) by Horner."""
    acc = []
    for c in reversed(a):
        acc = add(mul(acc, b, maxdeg), const(c))
    return acc


def shift_basis(a):
    """Coefficients of a(X) rewritten in powers of Z = 1 + X."""
    out = [Fraction(0)] * len(a)
    for k, c in enumerate(a):
        if c == 0:
            continue
        # X^k = (Z - 1)^k
        for i in range(k + 1):
            out[i] += c * comb(k, i) * (-1) ** (k - i)
    return trim(out)


def frobenius_x(p):
    """(1+X)^p - 1."""
    return trim([Fraction(0)] + [Fraction(comb(p, i)) for i in range(1, p + 1)])


@lru_cache(maxsize=None)
def _q_level(p, n, maxdeg):
    step = p ** (n - 1)
    top = (p - 1) * step if maxdeg is None else min((p - 1) * step, maxdeg)
    return tuple(Fraction(sum(comb(j * step, i) for j in range(p))) for i in range(top + 1))


def q_level(p, n, maxdeg=None):
    """phi^{n-1}(q) = sum_{j<p} (1+X)^{j p^{n-1}}, a monic polynomial; truncated above maxdeg."""
    return list(_q_level(p, n, maxdeg))
