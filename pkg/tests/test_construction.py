import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma import catalog
from phigamma.construction import (
    det_slope_certificate,
    glue,
    perturb_section,
    recover_filtered,
    required_kmax,
    same_filtered,
    same_span,
    sized_profile,
    verify_module,
)
from phigamma.errors import Unsupported, ValidationError, WindowTooSmall
from phigamma.filtered import FilteredModule, invariants_tn_th
from phigamma.robba import PrecisionProfile, RobbaElement, atom

PROFILE = PrecisionProfile()


def constant(c, profile=PROFILE):
    return RobbaElement.constant(profile, c)


def test_diagonal_flag_sections_on_two_levels():
    prof = PROFILE.with_(n0=1, n1=2)
    M = glue(catalog.diagonal_flag(2), prof)
    alpha = RobbaElement(prof, {(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 4), (2, 0): Fraction(1, 8)})
    expected = [[alpha.shift_t(-1), constant(1, prof).shift_t(-1)], [constant(1, prof), RobbaElement(prof)]]
    assert sorted(map(repr, M.sections)) == sorted(map(repr, expected))
    assert M.phi_matrix[0][0] == constant(1, prof) and M.phi_matrix[1][1] == constant(1, prof)
    assert det_slope_certificate(M) == 0
    assert verify_module(M, catalog.diagonal_flag(2), prof).ok


def test_bad_flag_phi_matrix_is_diagonal():
    M = glue(catalog.diagonal_bad_flag(2), PROFILE)
    assert M.phi_matrix == [[constant(Fraction(1, 2)), RobbaElement(PROFILE)],
                            [RobbaElement(PROFILE), constant(2)]]
    assert M.sections[0] == [constant(1).shift_t(-1), RobbaElement(PROFILE)]


def test_rank_one_slope():
    D = FilteredModule.rank_one(2, 3, 1)
    M = glue(D, PROFILE)
    assert M.phi_matrix == [[constant(4)]]
    assert det_slope_certificate(M) == 2


def test_perturbed_section_fails_the_lattice_check():
    D = catalog.diagonal_flag(2)
    M = glue(D, PROFILE)
    k = next(i for i, g in enumerate(M.sections) if g[1] != RobbaElement(PROFILE))
    X = atom("X", PROFILE)
    bad = perturb_section(M, k, [X.shift_t(-1), RobbaElement(PROFILE)])
    report = verify_module(bad, D, PROFILE)
    assert not report.checks["lattice"][0]
    assert len(report.checks["lattice"][1]) == len(list(PROFILE.levels))


def test_monodromy_is_refused():
    with pytest.raises(Unsupported):
        glue(catalog.monodromy_pair(2), PROFILE)


def test_invalid_module_is_refused():
    with pytest.raises(ValidationError):
        glue(FilteredModule(2, [[0, 0], [0, 1]], None, []), PROFILE)


def test_small_window_names_the_needed_size():
    D = catalog.antidiagonal(2)
    small = PROFILE.with_(kmax=16, T=8)
    need = required_kmax(D, small, 1)
    with pytest.raises(WindowTooSmall, match=str(need)):
        glue(D, small, w_extra=1)


@pytest.mark.parametrize("make", [catalog.diagonal_flag, catalog.diagonal_bad_flag, catalog.antidiagonal])
@pytest.mark.parametrize("p", [2, 3])
def test_reference_round_trip(make, p):
    D = make(p)
    prof = sized_profile(D, PrecisionProfile(p=p), w_extra=1)
    M = glue(D, prof)
    assert verify_module(M, D, prof).ok
    assert same_filtered(recover_filtered(M, prof), D)
    assert same_span(M, glue(D, prof, w_extra=1), prof)[0]
    tn, th = invariants_tn_th(D)
    assert det_slope_certificate(M) == tn - th


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_round_trip_and_det_law(seed):
    D = catalog.random_module(random.Random(seed), 2)
    prof = sized_profile(D, PROFILE)
    M = glue(D, prof)
    tn, th = invariants_tn_th(D)
    assert det_slope_certificate(M) == tn - th
    assert verify_module(M, D, prof).ok
    assert same_filtered(recover_filtered(M, prof), D)
