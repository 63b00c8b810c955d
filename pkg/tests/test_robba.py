from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma.errors import NotAUnit, PrecisionExhausted
from phigamma.local_fields import AtLeast, cyclotomic_field
from phigamma.robba import (
    LogRobbaElement,
    PrecisionProfile,
    RobbaElement,
    atom,
    derive,
    frobenius,
    gamma_act,
    interpolation_series,
    invert_unit,
    iota,
    log_operators,
    ord_estimate,
    partial_unit,
    zero_order,
)

PROFILE = PrecisionProfile()
SMALL = PrecisionProfile(n0=1, n1=2)

coeff = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def elements(max_x=10, min_x=0, t_powers=(-1, 0, 1, 2), profile=PROFILE):
    keys = st.tuples(st.integers(min_x, max_x), st.sampled_from(t_powers))
    return st.dictionaries(keys, coeff, max_size=5).map(lambda d: RobbaElement(profile, d))


def X(profile=PROFILE):
    return atom("X", profile)


# ---------------------------------------------------------------- frozen values

def test_partial_units_closed_forms():
    assert partial_unit(1, 1, SMALL) == RobbaElement(SMALL, {(0, 0): 1, (1, 0): 1, (2, 0): Fraction(1, 2)})
    assert partial_unit(2, 1, SMALL) == RobbaElement(SMALL, {(1, 0): -1, (2, 0): Fraction(-1, 2)})


def test_two_level_interpolant():
    alpha = interpolation_series({1: Fraction(1, 2), 2: Fraction(1, 4)}, SMALL)
    assert alpha == RobbaElement(SMALL, {(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 4), (2, 0): Fraction(1, 8)})
    assert iota(alpha, 1).coefficient(0) == cyclotomic_field(2, 1).one() * Fraction(1, 2)
    assert iota(alpha, 2).coefficient(0) == cyclotomic_field(2, 2).one() * Fraction(1, 4)


def test_iota_of_x_at_level_one():
    s = iota(X(), 1)
    F = cyclotomic_field(2, 1)
    assert [s.coefficient(k) for k in range(3)] == [F.one() * -2, F.one() * Fraction(-1, 2), F.one() * Fraction(-1, 8)]


def test_t_is_fixed_by_the_rules():
    t = atom("t", PROFILE)
    assert frobenius(t) == t.scale(2)
    assert gamma_act(t, 3) == t.scale(3)
    assert derive(t, "partial") == RobbaElement.constant(PROFILE, 1)
    assert iota(t, 2).valuation() == 1


def test_q_is_not_a_unit_on_the_first_annulus():
    q = atom("q_level", PROFILE, 1)
    with pytest.raises(NotAUnit):
        invert_unit(q)
    shifted = PROFILE.with_(n0=2)
    q2 = atom("q_level", shifted, 1)
    inv = invert_unit(q2)
    prod = (q2 * inv).x_coeffs()
    assert prod.get(0) == 1
    assert all(c == 0 for k, c in prod.items() if k != 0 and k <= shifted.kmax // 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_q_level_is_a_uniformizer_at_its_level(n):
    q = atom("q_level", PROFILE, n)
    assert zero_order(q, n) == 1
    for m in PROFILE.levels:
        if m != n:
            assert zero_order(q, m) == 0


def test_iota_refuses_truncated_input():
    f = frobenius(RobbaElement.from_x_coeffs(PROFILE, {-1: 1}))
    with pytest.raises(PrecisionExhausted):
        iota(f, 1)


def test_order_frozen():
    assert ord_estimate(atom("t", PROFILE)).value == 1
    assert ord_estimate(RobbaElement.constant(PROFILE, 5)).value == 0
    assert str(ord_estimate(atom("t", PROFILE))) == "ord = 1 (window-limited)"


def test_monodromy_of_log_x():
    lx = LogRobbaElement.lx(PROFILE)
    assert log_operators("N", lx) == LogRobbaElement.lift(RobbaElement.constant(PROFILE, Fraction(-2, 1)))
    lhs = log_operators("N", log_operators("phi", lx))
    rhs = log_operators("phi", log_operators("N", lx)) * 2
    assert (lhs - rhs).is_zero()


# ---------------------------------------------------------------- properties

@given(elements(), elements(), elements())
def test_ring_axioms(f, g, h):
    assert f * g == g * f
    assert (f + g) * h == f * h + g * h
    assert (f * g) * h == f * (g * h)
    assert (f - f).is_zero()


@given(elements(), elements())
def test_frobenius_is_a_ring_map(f, g):
    assert frobenius(f * g) == frobenius(f) * frobenius(g)
    assert frobenius(f + g) == frobenius(f) + frobenius(g)


@given(elements(max_x=5))
def test_frobenius_commutes_with_gamma(f):
    assert (frobenius(gamma_act(f, 3)) - gamma_act(frobenius(f), 3)).is_zero()


@given(elements(min_x=-3), elements(min_x=-3))
def test_leibniz(f, g):
    for mode in ("partial", "nabla"):
        assert (derive(f * g, mode) - derive(f, mode) * g - f * derive(g, mode)).is_zero()


@settings(max_examples=25, deadline=None)
@given(elements(max_x=8))
def test_iota_frobenius_compatibility(f):
    for n in (1, 2):
        assert (iota(frobenius(f), n + 1) - iota(f, n).embed(n + 1)).is_zero()


@settings(max_examples=25, deadline=None)
@given(elements(max_x=8), elements(max_x=8))
def test_iota_is_multiplicative(f, g):
    assert (iota(f * g, 2) - iota(f, 2) * iota(g, 2)).is_zero()


@given(st.sampled_from(["one", "t", "t2", "unit"]), st.integers(-3, 3))
def test_order_shift_law_on_atoms(name, k):
    t = atom("t", PROFILE)
    x = {"one": RobbaElement.constant(PROFILE, 1), "t": t, "t2": t * t,
         "unit": partial_unit(1, 2, PROFILE)}[name]
    assert ord_estimate(x.shift_t(k)).value == ord_estimate(x).value + k


@given(st.integers(1, 3), st.integers(1, 3))
def test_partial_units_congruences(n, w):
    u = partial_unit(n, w, PROFILE)
    for m in PROFILE.levels:
        v = zero_order(u - 1 if m == n else u, m)
        assert isinstance(v, AtLeast) or v >= w
