from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma import catalog
from phigamma.errors import Unsupported, ValidationError
from phigamma.filtered import FilteredModule
from phigamma.membership import SemistableData, membership, zero_order_form
from phigamma.robba import LogRobbaElement, PrecisionProfile, RobbaElement, atom

PROFILE = PrecisionProfile()
ONE = RobbaElement.constant(PROFILE, 1)
ZERO = RobbaElement(PROFILE)
T = atom("t", PROFILE)


def data_for(D):
    return SemistableData.from_module(D)


def test_trivial_module_accepts_constants_and_rejects_t():
    data = data_for(FilteredModule(2, [[1]], None, [(0, [[1]])]))
    assert membership([ONE], data, PROFILE).member
    verdict = membership([T], data, PROFILE)
    assert not verdict.member
    assert verdict.cond3 == [(False, 1)]
    assert membership([ZERO], data, PROFILE).member


def test_slope_one_rank_one_accepts_t_inverse():
    data = data_for(FilteredModule.rank_one(2, 1, 1))
    assert membership([ONE.shift_t(-1)], data, PROFILE).member
    assert not membership([ONE.shift_t(-2)], data, PROFILE).member


def test_product_of_q_levels_for_negative_slope():
    data = data_for(FilteredModule.rank_one(2, -1, -1))
    x = atom("q_level", PROFILE, 1) * atom("q_level", PROFILE, 2) * atom("q_level", PROFILE, 3)
    assert membership([x], data, PROFILE).member
    assert zero_order_form([x], data, PROFILE).member


def test_diagonal_flag_e_and_te():
    data = data_for(catalog.diagonal_flag(2))
    assert membership([ONE, ZERO], data, PROFILE).member
    verdict = membership([T, ZERO], data, PROFILE)
    assert not verdict.member
    assert not verdict.cond3[0][0]


def test_non_admissible_data_is_refused():
    with pytest.raises(ValidationError):
        data_for(catalog.diagonal_bad_flag(2))


def test_zero_order_form_needs_plain_candidates():
    data = data_for(FilteredModule(2, [[1]], None, [(0, [[1]])]))
    with pytest.raises(Unsupported):
        zero_order_form([LogRobbaElement.lx(PROFILE)], data, PROFILE)


def test_wrong_length_candidate():
    data = data_for(catalog.diagonal_flag(2))
    with pytest.raises(ValidationError):
        membership([ONE], data, PROFILE)


candidates = st.builds(
    lambda base, k, c: base.shift_t(k).scale(c),
    st.sampled_from([ONE, T, atom("X", PROFILE) + 2, atom("q_level", PROFILE, 2)]),
    st.integers(-1, 1),
    st.sampled_from([1, Fraction(1, 3), 4, -2]),
)


@settings(max_examples=30, deadline=None)
@given(candidates, st.integers(-1, 1))
def test_two_forms_agree(x, v):
    data = data_for(FilteredModule.rank_one(2, v, v))
    a, b = membership([x], data, PROFILE), zero_order_form([x], data, PROFILE)
    assert a.member == b.member
    assert {n: ok for n, (ok, _) in a.cond2.items()} == {n: ok for n, (ok, _) in b.cond2.items()}
