"""The acceptance suite: ten criteria, each returning a pass/fail line."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import catalog
from . import linalg as la
from .construction import (
    det_slope_certificate,
    embeds,
    glue,
    recover_filtered,
    same_filtered,
    same_span,
    sized_profile,
    verify_module,
)
from .errors import HNJoinFailure, PhiGammaError
from .filtered import enumerate_subobjects, hn_slopes, invariants_tn_th, is_admissible, restrict
from .local_fields import AtLeast, vp
from .membership import SemistableData, membership, zero_order_form
from .robba import (
    LogRobbaElement,
    PrecisionProfile,
    RobbaElement,
    atom,
    derive,
    frobenius,
    gamma_act,
    interpolation_series,
    iota,
    log_operators,
    ord_estimate,
    partial_unit,
    zero_order,
)


@dataclass
class Outcome:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name}: {self.detail}"


def _span_is(basis, vec):
    return len(basis) == 1 and la.rank([basis[0], vec]) == 1


def _same(a, b):
    return (a - b).is_zero()


# ---------------------------------------------------------------- 1-3: reference modules

def criterion_diagonal_flag(profile):
    p = profile.p
    D = catalog.diagonal_flag(p)
    profile = sized_profile(D, profile)
    problems = []
    if invariants_tn_th(D) != (1, 1):
        problems.append(f"(t_N, t_H) = {invariants_tn_th(D)}")
    if not is_admissible(D):
        problems.append("not admissible")
    if hn_slopes(D).slopes != [0, 0]:
        problems.append(f"HN slopes {hn_slopes(D).slopes}")
    M = glue(D, profile)
    if det_slope_certificate(M) != 0:
        problems.append("det slope != 0")
    report = verify_module(M, D, profile)
    if not report.ok:
        problems.append(f"verification: {report}")
    alpha = interpolation_series({n: Fraction(1, p ** n) for n in profile.levels}, profile)
    e_sec = [RobbaElement.constant(profile, 1), RobbaElement(profile)]
    pole_sec = [alpha.shift_t(-1), RobbaElement.constant(profile, 1).shift_t(-1)]
    got = {tuple(map(repr, g)) for g in M.sections}
    if {tuple(map(repr, e_sec)), tuple(map(repr, pole_sec))} != got:
        problems.append("sections are not e and (alpha e + f)/t")
    small = profile.with_(n0=1, n1=2)
    alpha2 = interpolation_series({1: Fraction(1, p), 2: Fraction(1, p * p)}, small)
    if p == 2 and alpha2 != RobbaElement(small, {(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 4),
                                                 (2, 0): Fraction(1, 8)}):
        problems.append(f"two-level interpolant {alpha2}")
    M2 = glue(D, small)
    if not any(g[0] == alpha2.shift_t(-1) for g in M2.sections):
        problems.append("two-level module misses (alpha e + f)/t")
    for basis, expect in (([[1, 0]], 0), ([[0, 1]], 1)):
        sub = restrict(D, basis)
        Ms = glue(sub, sized_profile(sub, profile))
        if det_slope_certificate(Ms) != expect or not embeds(Ms, basis, D, profile):
            problems.append(f"sub-module {basis} slope")
    return not problems, "; ".join(problems) or "t_N = t_H = 1, admissible, slopes [0, 0], det slope 0, sub-slopes 0 and 1"


def criterion_bad_flag(profile):
    p = profile.p
    D = catalog.diagonal_bad_flag(p)
    profile = sized_profile(D, profile)
    problems = []
    adm = is_admissible(D)
    if adm or not _span_is(adm.witness.basis, [1, 0]):
        problems.append("admissibility witness")
    if hn_slopes(D).slopes != [-1, 1]:
        problems.append(f"HN slopes {hn_slopes(D).slopes}")
    M = glue(D, profile)
    t_inv_e = [RobbaElement.constant(profile, 1).shift_t(-1), RobbaElement(profile)]
    f = [RobbaElement(profile), RobbaElement.constant(profile, 1)]
    if [list(map(repr, g)) for g in M.sections] != [list(map(repr, t_inv_e)), list(map(repr, f))]:
        problems.append("sections are not t^{-1} e and f")
    P = [[x.t_part(0).get(0, 0) if x.t_powers() in ([], [0]) and set(x.t_part(0)) <= {0} else None
          for x in row] for row in M.phi_matrix]
    if P != [[Fraction(1, p), 0], [0, p]]:
        problems.append(f"phi-matrix {M.phi_matrix}")
    tn, th = invariants_tn_th(D)
    if det_slope_certificate(M) != tn - th or tn - th != 0:
        problems.append("det slope")
    return not problems, "; ".join(problems) or "witness span(e), slopes [-1, 1], sections t^-1 e and f, phi = diag(1/p, p)"


def _agreement(a, b, upto, p):
    return min(vp(a.get(k, 0) - b.get(k, 0), p) for k in range(upto + 1))


def criterion_antidiagonal(profile):
    p = profile.p
    D = catalog.antidiagonal(p)
    problems = []
    if not is_admissible(D):
        problems.append("not admissible")
    if hn_slopes(D).slopes != [0, 0]:
        problems.append(f"HN slopes {hn_slopes(D).slopes}")
    lines = [s for s in enumerate_subobjects(D).nonzero() if s.dim == 1]
    for vec in ([1, p], [1, -p]):
        match = [s for s in lines if _span_is(s.basis, vec)]
        if len(match) != 1 or match[0].t_n - match[0].t_h != 1:
            problems.append(f"eigenline {vec}")
    tx = {k - 1: c for k, c in atom("t", profile).x_series().t_part(0).items()}
    q = atom("q_level", profile, 1)
    upto = profile.kmax // 2
    history = []
    for M in range(2, 6):
        tp, tm = atom("t_plus", profile, M), atom("t_minus", profile, M)
        if not (frobenius(tm) - tp).is_zero():
            problems.append(f"phi(t_minus) != t_plus at M = {M}")
        if not (q * frobenius(tp) - atom("t_minus", profile, M + 1).scale(p)).is_zero():
            problems.append(f"q phi(t_plus) != p t_minus at M = {M}")
        history.append(_agreement((tp * tm).t_part(0), tx, upto, p))
    if any(b <= a for a, b in zip(history, history[1:])):
        problems.append(f"agreement with t/X not improving: {history}")
    return not problems, "; ".join(problems) or f"slopes [0, 0], eigenlines of slope 1, t_plus t_minus vs t/X agreement {history}"


# ---------------------------------------------------------------- 4, 5, 10: random corpus

@lru_cache(maxsize=None)
def _corpus(p, n0, n1, count=20, seed=20240611):
    rng = random.Random(seed + 1)
    extra = [catalog.random_admissible(rng, p) for _ in range(count // 2)]
    return catalog.random_corpus(seed, count, p) + extra


@lru_cache(maxsize=None)
def _glued(p, n0, n1, index):
    D = _corpus(p, n0, n1)[index]
    prof = sized_profile(D, PrecisionProfile(p=p, n0=n0, n1=n1))
    return glue(D, prof)


def criterion_det_slope(profile):
    bad = []
    corpus = _corpus(profile.p, profile.n0, profile.n1)
    for i, D in enumerate(corpus):
        tn, th = invariants_tn_th(D)
        try:
            s = det_slope_certificate(_glued(profile.p, profile.n0, profile.n1, i))
        except PhiGammaError as exc:
            bad.append(f"#{i}: {exc}")
            continue
        if s != tn - th:
            bad.append(f"#{i}: certificate {s} vs {tn - th}")
    return not bad, "; ".join(bad) or f"{len(corpus)} modules, det slope = t_N - t_H exactly"


def criterion_admissible_iff_zero(profile):
    bad, failures, n_adm = [], 0, 0
    corpus = _corpus(profile.p, profile.n0, profile.n1)
    for i, D in enumerate(corpus):
        try:
            slopes = hn_slopes(D).slopes
        except HNJoinFailure as exc:
            failures += 1
            bad.append(f"#{i}: HN join failure reported ({exc})")
            continue
        adm = bool(is_admissible(D))
        n_adm += adm
        if adm != all(s == 0 for s in slopes):
            bad.append(f"#{i}: admissible={adm}, slopes={slopes}")
    return not bad, "; ".join(bad) or f"{len(corpus)} modules ({n_adm} admissible), 0 HN join failures"


def criterion_round_trip(profile):
    bad = []
    p = profile.p
    for name, D in (("diagonal flag", catalog.diagonal_flag(p)), ("bad flag", catalog.diagonal_bad_flag(p)),
                    ("antidiagonal", catalog.antidiagonal(p))):
        prof = sized_profile(D, profile, w_extra=1)
        M = glue(D, prof)
        if not same_filtered(recover_filtered(M, prof), D):
            bad.append(name)
        ok, detail = same_span(M, glue(D, prof, w_extra=1), prof)
        if not ok:
            bad.append(f"{name} uniqueness {detail}")
    corpus = _corpus(profile.p, profile.n0, profile.n1)
    for i in range(10):
        M = _glued(profile.p, profile.n0, profile.n1, i)
        if not verify_module(M, corpus[i], M.profile).ok:
            bad.append(f"#{i} verification")
        if not same_filtered(recover_filtered(M, M.profile), corpus[i]):
            bad.append(f"#{i} round trip")
    return not bad, "; ".join(bad) or "3 reference + 10 random modules recovered exactly; glue runs agree at every level"


# ---------------------------------------------------------------- 6-9: ring layer

def criterion_ring_identities(profile):
    rng = random.Random(6)
    p = profile.p
    levels = list(profile.levels)
    bad = []
    a = 3 if p == 2 else 2
    for trial in range(50):
        f = catalog.random_element(rng, profile, max_x=profile.kmax // (2 * (a + 1) * p))
        g = catalog.random_element(rng, profile, max_x=profile.kmax // (4 * p), negative=True)
        for n in levels[:-1]:
            if not (iota(frobenius(f), n + 1) - iota(f, n).embed(n + 1)).is_zero():
                bad.append(f"iota/phi #{trial} level {n}")
        if not (frobenius(gamma_act(f, a)) - gamma_act(frobenius(f), a)).is_zero():
            bad.append(f"phi gamma #{trial}")
        leib = derive(f * g, "nabla") - (derive(f, "nabla") * g + f * derive(g, "nabla"))
        if not leib.is_zero():
            bad.append(f"Leibniz #{trial}")
    lx = LogRobbaElement.lx(profile)
    lhs = log_operators("N", log_operators("phi", lx))
    rhs = log_operators("phi", log_operators("N", lx)) * p
    if not (lhs - rhs).is_zero():
        bad.append("N phi(l_X) != p phi N(l_X)")
    for n in levels:
        if zero_order(atom("q_level", profile, n), n) != 1:
            bad.append(f"q-level uniformizer at {n}")
    return not bad, "; ".join(bad[:5]) or "50 random elements, zero failures"


def criterion_partial_units(profile):
    bad = []
    checked = 0
    for p in (2, 3):
        prof = PrecisionProfile(p=p, kmax=96, n0=1, n1=3, T=8)
        for n in prof.levels:
            for w in (1, 2, 3):
                u = partial_unit(n, w, prof)
                for m in prof.levels:
                    val = zero_order(u - 1 if m == n else u, m)
                    checked += 1
                    if not (isinstance(val, AtLeast) or val >= w):
                        bad.append(f"p={p} n={n} w={w} level {m}: {val}")
    small = PrecisionProfile(p=2, n0=1, n1=2)
    t11 = RobbaElement(small, {(0, 0): 1, (1, 0): 1, (2, 0): Fraction(1, 2)})
    t21 = RobbaElement(small, {(1, 0): -1, (2, 0): Fraction(-1, 2)})
    if partial_unit(1, 1, small) != t11 or partial_unit(2, 1, small) != t21:
        bad.append("closed forms at p = 2")
    return not bad, "; ".join(bad) or f"{checked} congruences exact; closed forms reproduced"


def criterion_order(profile):
    bad = []
    p = profile.p
    narrow = PrecisionProfile(p=p, kmin=0, kmax=p, T=1)
    for prof in (narrow, profile):
        if ord_estimate(atom("t", prof)).value != 1 or ord_estimate(atom("t", prof).x_series()).value != 1:
            bad.append(f"ord(t) at kmax={prof.kmax}")
    for c in (1, Fraction(-3, 7), p ** 3, Fraction(1, p)):
        if ord_estimate(RobbaElement.constant(profile, c)).value != 0:
            bad.append(f"ord({c})")
    t = atom("t", profile)
    atoms = [RobbaElement.constant(profile, 1), t, t * t, partial_unit(profile.n0, 2, profile)]
    for x in atoms:
        base = ord_estimate(x).value
        for k in (-2, -1, 1, 2):
            if ord_estimate(x.shift_t(k)).value != base + k:
                bad.append(f"shift law on {x}")
    bounded = [RobbaElement.from_x_coeffs(profile, {k: 1 for k in range(profile.kmax + 1)}),
               RobbaElement.from_x_coeffs(profile, {k: Fraction(p) ** k for k in range(20)}),
               RobbaElement.from_x_coeffs(profile, {k: Fraction(1, 1 + k * p) for k in range(30)})]
    if not all(ord_estimate(b).value <= 0 for b in bounded):
        bad.append("bounded series rejected")
    if ord_estimate(t).value <= 0 or ord_estimate(t.x_series()).value <= 0:
        bad.append("t accepted as bounded")
    return not bad, "; ".join(bad) or "ord(t) = 1, ord(c) = 0, shift law exact, bounded test separates"


def criterion_membership(profile):
    p = profile.p
    bad = []
    one, t = RobbaElement.constant(profile, 1), atom("t", profile)
    trivial = SemistableData.from_module(catalog.FilteredModule(p, [[1]], None, [(0, [[1]])]))
    if not membership([one], trivial, profile).member:
        bad.append("1 rejected")
    v = membership([t], trivial, profile)
    if v.member or v.cond3[0][0] or v.cond3[0][1] != 1:
        bad.append("t accepted")
    slope_one = SemistableData.from_module(catalog.FilteredModule.rank_one(p, 1, 1))
    if not membership([one.shift_t(-1)], slope_one, profile).member:
        bad.append("t^-1 rejected")
    data = SemistableData.from_module(catalog.diagonal_flag(p))
    zero = RobbaElement(profile)
    if not membership([one, zero], data, profile).member:
        bad.append("e rejected")
    v = membership([t, zero], data, profile)
    if v.member or v.cond3[0][0]:
        bad.append("t e accepted")
    rng = random.Random(9)
    disagreements, members = 0, 0
    for trial in range(10):
        v = rng.randint(-1, 1)
        data_r = SemistableData.from_module(catalog.FilteredModule.rank_one(p, v, v))
        x = [_random_candidate(rng, profile)]
        a, b = membership(x, data_r, profile), zero_order_form(x, data_r, profile)
        members += a.member
        levels_a = {n: ok for n, (ok, _) in a.cond2.items()}
        levels_b = {n: ok for n, (ok, _) in b.cond2.items()}
        if a.member != b.member or levels_a != levels_b:
            disagreements += 1
    if disagreements:
        bad.append(f"{disagreements} disagreements between the two forms")
    return not bad, "; ".join(bad) or f"rank-one verdicts exact, e member, t e rejected; forms agree on 10 cases ({members} members)"


def _random_candidate(rng, profile):
    choice = rng.randrange(4)
    one = RobbaElement.constant(profile, 1)
    qs = atom("q_level", profile, profile.n0)
    for n in range(profile.n0 + 1, profile.n1 + 1):
        qs = qs * atom("q_level", profile, n)
    base = [one, qs, atom("t", profile), atom("X", profile) + 2][choice]
    return base.shift_t(rng.choice([-1, 0, 0, 1])).scale(rng.choice([1, Fraction(1, 3), 4]))


CRITERIA = [
    (1, "diagonal module with flag e+f", criterion_diagonal_flag),
    (2, "diagonal module with flag e", criterion_bad_flag),
    (3, "antidiagonal module and t_plus/t_minus", criterion_antidiagonal),
    (4, "determinant slope law on random modules", criterion_det_slope),
    (5, "admissible iff all HN slopes vanish", criterion_admissible_iff_zero),
    (6, "ring identities", criterion_ring_identities),
    (7, "partial units", criterion_partial_units),
    (8, "order function", criterion_order),
    (9, "membership criterion", criterion_membership),
    (10, "round trip and uniqueness", criterion_round_trip),
]


def run_criterion(number, profile=None):
    profile = profile or PrecisionProfile()
    for num, name, fn in CRITERIA:
        if num == number:
            start = time.perf_counter()
            try:
                ok, detail = fn(profile)
            except PhiGammaError as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return Outcome(num, name, ok, detail, time.perf_counter() - start)
    raise ValueError(f"no criterion {number}")


def run_all(profile=None):
    return [run_criterion(num, profile) for num, _, _ in CRITERIA]
