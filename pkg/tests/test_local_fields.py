from fractions import Fraction
from math import inf

import pytest
from hypothesis import given
from hypothesis import strategies as st

from phigamma.errors import NotInvertible, PrecisionExhausted
from phigamma.local_fields import (
    AtLeast,
    PAdicScalar,
    TSeries,
    cyclotomic_field,
    newton_polygon,
    root_valuations,
    tseries_invert,
    vp,
)

rationals = st.fractions(max_denominator=200).filter(lambda q: abs(q.numerator) < 10 ** 6)
nonzero = rationals.filter(bool)


def test_vp_frozen():
    assert vp(Fraction(3, 8), 2) == -3
    assert vp(Fraction(50), 5) == 2
    assert vp(Fraction(7, 9), 3) == -2
    assert vp(0, 2) == inf


@given(nonzero, nonzero, st.sampled_from([2, 3, 5]))
def test_vp_is_a_valuation(a, b, p):
    assert vp(a * b, p) == vp(a, p) + vp(b, p)
    if a + b:
        assert vp(a + b, p) >= min(vp(a, p), vp(b, p))


@given(nonzero, st.sampled_from([2, 3]))
def test_padic_scalar_round_trip(a, p):
    x = PAdicScalar.from_rational(a, p, 20)
    assert x.to_rational() == a or vp(x.to_rational() - a, p) >= 20
    one = (x * x.inverse()).to_rational()
    assert one == 1 or vp(one - 1, p) >= 10


def test_uniformizer_valuations():
    assert cyclotomic_field(2, 2).pi().valuation() == Fraction(1, 2)
    assert cyclotomic_field(3, 1).pi().valuation() == Fraction(1, 2)
    assert cyclotomic_field(2, 3).pi().valuation() == Fraction(1, 4)
    assert cyclotomic_field(3, 2).pi().valuation() == Fraction(1, 6)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_zeta_has_order_p_power(p, n):
    F = cyclotomic_field(p, n)
    z = F.zeta_power(1)
    acc = F.one()
    for _ in range(p ** n):
        acc = acc * z
    assert acc == F.one()
    if n > 0:
        acc = F.one()
        for _ in range(p ** (n - 1)):
            acc = acc * z
        assert acc != F.one()


@pytest.mark.parametrize("p,n", [(2, 2), (3, 1), (3, 2)])
def test_field_inverse(p, n):
    F = cyclotomic_field(p, n)
    x = F.pi() + F.one() * 3
    assert x * x.inverse() == F.one()


def test_embedding_is_a_ring_map():
    F1, F2 = cyclotomic_field(2, 1), cyclotomic_field(2, 2)
    a = F1.zeta_power(1) + F1.one() * Fraction(1, 3)
    b = F1.pi() * 5
    assert (a * b).embed(2) == a.embed(2) * b.embed(2)
    assert (a * b).embed(2).level == F2.pi().level


def test_tseries_inverse_and_precision():
    F = cyclotomic_field(2, 1)
    f = TSeries(F, 1, [F.one() * 2, F.one(), F.one() * 3], 6)
    g = tseries_invert(f)
    prod = f * g
    assert prod.valuation() == 0
    assert all(prod.coefficient(k) == (F.one() if k == 0 else F.zero()) for k in range(prod.prec))
    with pytest.raises(PrecisionExhausted):
        f.coefficient(6)
    with pytest.raises(NotInvertible):
        tseries_invert(TSeries(F, 0, [], 4))
    assert isinstance(TSeries(F, 0, [], 4).valuation(), AtLeast)


def test_newton_polygon_frozen():
    # x^2 + 2x + 4 over Q_2: both roots of valuation 1
    assert root_valuations([(0, 2), (1, 1), (2, 0)]) == {1: 2}
    # (x - 1)(x - 4): valuations 0 and 2
    assert root_valuations([(0, 2), (1, 0), (2, 0)]) == {2: 1, 0: 1}
    assert newton_polygon([(0, 3), (1, inf), (2, 0)]) == [(0, 3, 2, 0)]
