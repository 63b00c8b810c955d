import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phigamma import catalog
from phigamma import linalg as la
from phigamma.filtered import (
    FilteredModule,
    adapted_basis,
    eigenvector,
    enumerate_subobjects,
    hn_slopes,
    invariants_tn_th,
    is_admissible,
    newton_slopes,
    quotient,
    restrict,
    slope_basis,
    validate,
)


def test_diagonal_flag_oracle():
    D = catalog.diagonal_flag(2)
    assert invariants_tn_th(D) == (1, 1)
    assert is_admissible(D)
    assert hn_slopes(D).slopes == [0, 0]
    assert invariants_tn_th(restrict(D, [[1, 0]])) == (0, 0)
    assert invariants_tn_th(restrict(D, [[0, 1]])) == (1, 0)


def test_bad_flag_oracle():
    D = catalog.diagonal_bad_flag(2)
    report = is_admissible(D)
    assert not report
    assert la.rank([report.witness.basis[0], [1, 0]]) == 1
    assert (report.witness.t_n, report.witness.t_h) == (0, 1)
    assert hn_slopes(D).slopes == [-1, 1]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_antidiagonal_oracle(p):
    D = catalog.antidiagonal(p)
    assert invariants_tn_th(D) == (2, 2)
    assert is_admissible(D)
    slopes = hn_slopes(D)
    assert slopes.slopes == [0, 0]
    lines = sorted(tuple(s.basis[0]) for s in enumerate_subobjects(D).nonzero() if s.dim == 1)
    assert lines == sorted([(1, Fraction(p)), (1, Fraction(-p))])
    assert all(s.t_n - s.t_h == 1 for s in enumerate_subobjects(D).nonzero() if s.dim == 1)


def test_eigenvectors_are_normalized():
    vecs = eigenvector([[0, 1], [4, 0]], Fraction(-2))
    assert vecs == [[1, Fraction(-2)]]


def test_validate_flags_monodromy_relation():
    D = FilteredModule(2, [[1, 0], [0, 1]], [[0, 1], [0, 0]], [])
    rules = {v.rule for v in validate(D)}
    assert rules
    assert not validate(catalog.monodromy_pair(2))


def test_validate_flags_singular_phi():
    D = FilteredModule(2, [[1, 1], [1, 1]], None, [])
    assert validate(D)


def test_adapted_basis_jumps():
    D = catalog.antidiagonal(2)
    assert [h for _, h in adapted_basis(D)] == [2, 0]
    assert sorted(D.jump_multiset()) == [0, 2]


def test_quotient_and_sub_add_up():
    D = catalog.diagonal_flag(3)
    sub = restrict(D, [[1, 0]])
    quo, _ = quotient(D, [[1, 0]])
    tn, th = invariants_tn_th(D)
    assert invariants_tn_th(sub)[0] + invariants_tn_th(quo)[0] == tn
    assert invariants_tn_th(sub)[1] + invariants_tn_th(quo)[1] == th


def test_newton_slopes_and_slope_basis():
    slopes, _ = newton_slopes([[0, 1], [8, 0]], 2)
    assert slopes == [Fraction(3, 2), Fraction(3, 2)]
    assert slope_basis([[0, 1], [8, 0]], 2) is not None
    assert slope_basis([[1, 0], [0, 4]], 2) == [([1, 0], 0), ([0, 1], 2)] or \
        sorted(s for _, s in slope_basis([[1, 0], [0, 4]], 2)) == [0, 2]


seeds = st.integers(0, 10 ** 6)


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from([2, 3]))
def test_admissible_iff_slopes_vanish(seed, p):
    D = catalog.random_module(random.Random(seed), p)
    slopes = hn_slopes(D).slopes
    assert bool(is_admissible(D)) == all(s == 0 for s in slopes)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_slopes_sum_and_order(seed):
    D = catalog.random_module(random.Random(seed), 2)
    slopes = hn_slopes(D).slopes
    tn, th = invariants_tn_th(D)
    assert sum(slopes) == tn - th
    assert slopes == sorted(slopes)
    assert len(slopes) == D.dim


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_generic_flags_with_matching_jumps_are_admissible(seed):
    D = catalog.random_admissible(random.Random(seed), 2)
    assert is_admissible(D)
    assert hn_slopes(D).slopes == [0] * D.dim


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_invariants_are_base_change_invariant(seed):
    rng = random.Random(seed)
    D = catalog.random_module(rng, 2)
    d = D.dim
    S = catalog._random_invertible(rng, d)
    Sinv = la.inverse(S)
    phi = la.matmul(Sinv, la.matmul(D.phi, S))
    filt = [(j, [la.matvec(Sinv, g) for g in gens]) for j, gens in D.filtration]
    E = FilteredModule(D.p, phi, None, filt)
    assert invariants_tn_th(E) == invariants_tn_th(D)
    assert hn_slopes(E).slopes == hn_slopes(D).slopes
