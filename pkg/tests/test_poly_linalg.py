from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma import _poly
from phigamma import linalg as la

small = st.fractions(min_value=-9, max_value=9, max_denominator=4)
polys = st.lists(small, max_size=6).map(_poly.trim)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 3), (3, 1), (3, 2), (5, 2)])
def test_q_level_matches_division(p, n):
    big = _poly.trim([Fraction(0)] + [Fraction(comb(p ** n, i)) for i in range(1, p ** n + 1)])
    sm = _poly.trim([Fraction(0)] + [Fraction(comb(p ** (n - 1), i)) for i in range(1, p ** (n - 1) + 1)])
    q, r = _poly.divmod_(big, sm)
    assert not r and _poly.q_level(p, n) == q
    assert _poly.q_level(p, n, 3) == q[:4]


@given(polys, polys)
def test_divmod_reconstructs(a, b):
    if not b:
        return
    q, r = _poly.divmod_(a, b)
    assert _poly.add(_poly.mul(q, b), r) == a
    assert len(r) < len(b)


@given(polys, polys.filter(lambda b: len(b) > 1))
def test_inverse_mod(a, m):
    g, s, _ = _poly.gcdex(a, m)
    if len(g) != 1:
        return
    inv = _poly.inverse_mod(a, m)
    assert _poly.mod(_poly.mul(a, inv), m) == [Fraction(1)]


matrices = st.integers(1, 4).flatmap(lambda d: st.lists(st.lists(small, min_size=d, max_size=d), min_size=d, max_size=d))


@settings(max_examples=60)
@given(matrices)
def test_inverse_det_adjugate(m):
    d = la.det(m)
    assert la.det_expand(m) == d
    if d:
        assert la.matmul(m, la.inverse(m)) == la.identity(len(m))
        adj = la.adjugate(m)
        assert la.matmul(m, adj) == [[d if i == j else 0 for j in range(len(m))] for i in range(len(m))]


@settings(max_examples=60)
@given(matrices)
def test_rank_nullity(m):
    d = len(m)
    kernel = la.nullspace(m)
    assert la.rank(m) + len(kernel) == d
    for v in kernel:
        assert la.matvec(m, v) == [0] * d
