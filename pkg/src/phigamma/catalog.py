"""Reference modules and seeded random generators shared by the self-test and the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from . import linalg as la
from .filtered import FilteredModule, is_admissible
from .robba import RobbaElement


def diagonal_flag(p=2):
    """phi(e) = e, phi(f) = p f; Fil^1 = span(e + f).  Admissible."""
    return FilteredModule(p, [[1, 0], [0, p]], None, [(0, la.identity(2)), (1, [[1, 1]])])


def diagonal_bad_flag(p=2):
    """phi(e) = e, phi(f) = p f; Fil^1 = span(e).  Not admissible."""
    return FilteredModule(p, [[1, 0], [0, p]], None, [(0, la.identity(2)), (1, [[1, 0]])])


def antidiagonal(p=2):
    """phi(e) = p^2 f, phi(f) = e; Fil^1 = Fil^2 = span(e).  Admissible."""
    return FilteredModule(p, [[0, 1], [p * p, 0]], None, [(0, la.identity(2)), (2, [[1, 0]])])


def monodromy_pair(p=2):
    """phi = diag(1, p) with N(f) = e."""
    return FilteredModule(p, [[1, 0], [0, p]], [[0, 1], [0, 0]], [(0, la.identity(2))])


def _units(p):
    return [c for c in (1, -1, 3, -3, 5, 7) if c % p]


def random_module(rng, p, max_dim=3, vals=range(-2, 4), jumps=range(-2, 4)):
    """phi with distinct eigenvalue valuations (conjugated by a random rational matrix)
    and a random complete flag carrying random jumps."""
    d = rng.randint(1, max_dim)
    vs = rng.sample(list(vals), d)
    lams = [Fraction(rng.choice(_units(p))) * Fraction(p) ** v for v in vs]
    S = _random_invertible(rng, d)
    diag = [[lams[i] if i == j else Fraction(0) for j in range(d)] for i in range(d)]
    phi = la.matmul(la.matmul(S, diag), la.inverse(S))
    js = sorted(rng.choices(list(jumps), k=d))
    cols = la.columns(_random_invertible(rng, d))
    steps = {}
    for k in range(d):
        if js[k] not in steps or len(cols[k:]) > len(steps[js[k]]):
            steps[js[k]] = cols[k:]
    return FilteredModule(p, phi, None, sorted(steps.items()))


def random_admissible(rng, p, max_dim=3, vals=range(-2, 4)):
    """Diagonalizable phi with jumps equal to the eigenvalue valuations on a flag in
    general position; such a module is admissible."""
    while True:
        d = rng.randint(1, max_dim)
        vs = sorted(rng.choices(list(vals), k=d))
        lams = [Fraction(rng.choice(_units(p))) * Fraction(p) ** v for v in vs]
        if len(set(lams)) < d:
            continue
        phi = [[lams[i] if i == j else Fraction(0) for j in range(d)] for i in range(d)]
        cols = la.columns(_random_invertible(rng, d))
        steps = {}
        for k in range(d):
            if vs[k] not in steps:
                steps[vs[k]] = cols[k:]
        D = FilteredModule(p, phi, None, sorted(steps.items()))
        if is_admissible(D):
            return D


def _random_invertible(rng, d):
    while True:
        m = [[Fraction(rng.randint(-2, 2)) for _ in range(d)] for _ in range(d)]
        if la.det(m) != 0:
            return m


def random_corpus(seed, count, p=2):
    rng = random.Random(seed)
    return [random_module(rng, p) for _ in range(count)]


def random_element(rng, profile, max_x=None, t_powers=(-1, 0, 1, 2), negative=False, terms=5):
    """Random window element with small rational coefficients."""
    max_x = max_x if max_x is not None else profile.kmax // (2 * profile.p)
    lo = -3 if negative else 0
    out = {}
    for _ in range(terms):
        k = rng.randint(lo, max_x)
        j = rng.choice(t_powers)
        out[(k, j)] = Fraction(rng.randint(-9, 9), rng.choice([1, 1, 2, 3, profile.p]))
    return RobbaElement(profile, out)
