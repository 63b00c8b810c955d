"""Filtered (phi, N)-modules over Q_p and their slope invariants.

Matrices follow the column convention: column j holds the coordinates of
phi(e_j) (resp. N(e_j)).  A filtration is a list of (jump, generators)
pairs; Fil^i is the span attached to the least listed jump >= i, the whole
space below the least jump and zero above the greatest.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy

from . import linalg as la
from .errors import HNJoinFailure, UnsupportedShape
from .local_fields import root_valuations, vp


def _frac_matrix(m):
    return [[Fraction(x) for x in row] for row in m]


def _vec(v):
    return [Fraction(x) for x in v]


@dataclass
class FilteredModule:
    p: int
    phi: list
    nmat: list
    filtration: list = field(default_factory=list)  # [(jump, [column vectors])]

    def __post_init__(self):
        self.phi = _frac_matrix(self.phi)
        self.nmat = _frac_matrix(self.nmat) if self.nmat else la.zeros(self.dim, self.dim)
        filt = []
        for jump, gens in sorted(self.filtration, key=lambda jg: jg[0]):
            filt.append((int(jump), la.column_span_basis([_vec(g) for g in gens])))
        if not filt and self.dim:
            filt = [(0, la.identity(self.dim))]
        self.filtration = filt

    @property
    def dim(self):
        return len(self.phi)

    @classmethod
    def rank_one(cls, p, nu, eta, unit=1):
        """phi(e) = unit * p^nu e, single jump eta."""
        return cls(p, [[Fraction(unit) * Fraction(p) ** nu]], [[0]], [(eta, [[1]])])

    @property
    def jumps(self):
        return [j for j, _ in self.filtration]

    def fil(self, i):
        """Basis (list of vectors) of Fil^i."""
        d = self.dim
        if not self.filtration:
            return la.identity(d)
        if i < self.filtration[0][0]:
            return la.identity(d)
        for jump, gens in self.filtration:
            if jump >= i:
                return [list(g) for g in gens]
        return []

    def relevant_indices(self):
        if not self.filtration:
            return [0]
        lo, hi = self.filtration[0][0], self.filtration[-1][0]
        return list(range(lo - 1, hi + 1))

    def jump_multiset(self):
        """Each i repeated dim gr^i times."""
        out = []
        for i in self.relevant_indices():
            g = la.span_dim(self.fil(i)) - la.span_dim(self.fil(i + 1))
            out.extend([i] * g)
        return out

    def is_scalar_phi(self):
        c = self.phi[0][0]
        return all(self.phi[i][j] == (c if i == j else 0)
                   for i in range(self.dim) for j in range(self.dim))


def subquotient_fil(D, basis):
    """Induced filtration on span(basis), as listed jumps in basis coordinates."""
    out = []
    for jump, _ in D.filtration:
        inter = la.intersect(basis, D.fil(jump), D.dim) if basis else []
        coords = [_coords_in(basis, v) for v in inter]
        out.append((jump, coords))
    return out


def _coords_in(basis, v):
    """Coordinates of v in the (independent) list ``basis``."""
    mat = la.from_columns(basis)
    sol = _solve_rect(mat, v)
    if sol is None:
        raise ValueError("vector not in span")
    return sol


def _solve_rect(mat, v):
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [list(mat[r]) + [v[r]] for r in range(rows)]
    m, piv = la.rref(aug)
    if cols in piv:
        return None
    x = [Fraction(0)] * cols
    for r, c in enumerate(piv):
        x[c] = m[r][cols]
    return x


def restrict(D, basis):
    """The sub-object span(basis) with induced structure, in basis coordinates."""
    basis = [_vec(b) for b in basis]
    k = len(basis)
    if k == 0:
        return FilteredModule(D.p, [], [], [])
    phi_cols = [_coords_in(basis, la.matvec(D.phi, b)) for b in basis]
    n_cols = [_coords_in(basis, la.matvec(D.nmat, b)) for b in basis]
    filt = subquotient_fil(D, basis)
    return FilteredModule(D.p, la.from_columns(phi_cols), la.from_columns(n_cols), filt)


def quotient(D, basis):
    """D / span(basis) on a complement basis; returns (module, complement vectors)."""
    basis = [_vec(b) for b in basis]
    full = la.complete_basis(basis, D.dim)
    comp = full[len(basis):]
    k = len(comp)
    if k == 0:
        return FilteredModule(D.p, [], [], []), comp

    def proj(v):
        return _coords_in(full, v)[len(basis):]

    phi_cols = [proj(la.matvec(D.phi, c)) for c in comp]
    n_cols = [proj(la.matvec(D.nmat, c)) for c in comp]
    filt = []
    for jump, _ in D.filtration:
        images = [proj(v) for v in D.fil(jump)]
        filt.append((jump, la.column_span_basis(images) if images else []))
    return FilteredModule(D.p, la.from_columns(phi_cols), la.from_columns(n_cols), filt), comp


# ---------------------------------------------------------------- validation

@dataclass
class Violation:
    rule: str
    witness: object

    def __str__(self):
        return f"{self.rule}: {self.witness}"


def validate(D):
    """List of violations (empty list means the module is valid)."""
    out = []
    d = D.dim
    if any(len(r) != d for r in D.phi) or len(D.nmat) != d or any(len(r) != d for r in D.nmat):
        return [Violation("shape", "phi and N must be square of the same size")]
    if d and la.det(D.phi) == 0:
        out.append(Violation("phi invertible", "det(phi) = 0"))
    nd = D.nmat
    power = nd
    for _ in range(d):
        power = la.matmul(power, nd)
    if d and any(x != 0 for r in la.matmul(la.identity(d), power) for x in r):
        out.append(Violation("N nilpotent", "N^d != 0"))
    lhs = la.matmul(D.nmat, D.phi)
    rhs = la.mscale(la.matmul(D.phi, D.nmat), D.p)
    bad = [j for j in range(d) if any(lhs[i][j] != rhs[i][j] for i in range(d))]
    if bad:
        out.append(Violation("N phi = p phi N", {"columns": bad}))
    prev = None
    for jump, gens in D.filtration:
        if any(len(g) != d for g in gens):
            out.append(Violation("filtration shape", {"jump": jump}))
            continue
        if prev is not None and not all(la.in_span(g, prev[1]) for g in gens):
            out.append(Violation("filtration decreasing", {"jump": jump, "not inside jump": prev[0]}))
        prev = (jump, gens)
    return out


# ---------------------------------------------------------------- invariants

def t_n(D):
    if D.dim == 0:
        return 0
    return vp(la.det(D.phi), D.p)


def t_h(D):
    return sum(D.jump_multiset())


def invariants_tn_th(D, basis=None):
    """(t_N, t_H) of D, or of the sub-object span(basis) when given."""
    if basis is not None:
        D = restrict(D, basis)
    return t_n(D), t_h(D)


def mu(D):
    return Fraction(t_n(D) - t_h(D), D.dim)


# ---------------------------------------------------------------- eigen data

def _charpoly(phi):
    x = sympy.Symbol("x")
    poly = sympy.Matrix(phi).charpoly(x)
    return poly, x


def rational_eigen(phi):
    """[(eigenvalue, multiplicity)] for rational roots, plus whether they exhaust the degree."""
    poly, _ = _charpoly(phi)
    roots = sympy.Poly(poly.as_expr(), poly.gen).ground_roots()
    pairs = [(Fraction(int(r.p), int(r.q)), m) for r, m in roots.items()]
    return sorted(pairs), sum(m for _, m in pairs) == len(phi)


def eigenvector(phi, lam):
    d = len(phi)
    shifted = [[phi[i][j] - (lam if i == j else 0) for j in range(d)] for i in range(d)]
    out = []
    for v in la.nullspace(shifted):
        lead = next(x for x in v if x)
        out.append([Fraction(x) / lead for x in v])
    return out


@dataclass
class Subobject:
    basis: list
    t_n: int = 0
    t_h: int = 0

    @property
    def dim(self):
        return len(self.basis)

    @property
    def mu(self):
        return Fraction(self.t_n - self.t_h, self.dim) if self.dim else None


@dataclass
class SubobjectLattice:
    kind: str  # "eigenlines" or "scalar"
    members: list  # enumerated Subobjects (eigenline case) or greedy extremal ones (scalar case)
    eigenlines: list = field(default_factory=list)

    def nonzero(self):
        return [s for s in self.members if s.dim]


def _sub(D, basis):
    tn, th = invariants_tn_th(D, basis)
    return Subobject([list(b) for b in basis], tn, th)


def _n_stable(D, basis):
    return all(la.in_span(la.matvec(D.nmat, b), basis) for b in basis) if basis else True


def enumerate_subobjects(D):
    d = D.dim
    if d == 0:
        return SubobjectLattice("eigenlines", [Subobject([])])
    if D.is_scalar_phi():
        # every subspace is a sub-object; keep the ones maximizing t_H per dimension
        members = [Subobject([])]
        adapted = adapted_basis(D)
        for k in range(1, d + 1):
            members.append(_sub(D, [v for v, _ in adapted[:k]]))
        return SubobjectLattice("scalar", members)
    pairs, split = rational_eigen(D.phi)
    if not split:
        raise UnsupportedShape("characteristic polynomial of phi does not split over Q")
    if any(m > 1 for _, m in pairs):
        raise UnsupportedShape("repeated eigenvalue with non-scalar phi: sub-object lattice is infinite")
    lines = [(lam, eigenvector(D.phi, lam)[0]) for lam, _ in pairs]
    members = []
    for k in range(d + 1):
        for combo in combinations(range(d), k):
            basis = [lines[i][1] for i in combo]
            if _n_stable(D, basis):
                members.append(_sub(D, basis))
    return SubobjectLattice("eigenlines", members, lines)


def adapted_basis(D):
    """Basis [(vector, h)] adapted to the filtration, highest jump first."""
    out = []
    for i in reversed(D.relevant_indices()):
        for v in D.fil(i):
            if not la.in_span(v, [w for w, _ in out]) if out else True:
                out.append((list(v), i))
    for v in la.identity(D.dim):
        if not la.in_span(v, [w for w, _ in out]) if out else True:
            out.append((list(v), D.relevant_indices()[0]))
    return out


# ---------------------------------------------------------------- admissibility

@dataclass
class AdmissibilityReport:
    admissible: bool
    witness: Subobject | None = None
    reason: str = ""

    def __bool__(self):
        return self.admissible


def is_admissible(D):
    tn, th = t_n(D), t_h(D)
    if tn != th:
        return AdmissibilityReport(False, Subobject([list(v) for v in la.identity(D.dim)], tn, th),
                                   f"t_N = {tn} != t_H = {th}")
    lattice = enumerate_subobjects(D)
    worst = None
    for s in lattice.nonzero():
        if s.t_n - s.t_h < 0 and (worst is None or s.t_n - s.t_h < worst.t_n - worst.t_h):
            worst = s
    if worst is not None:
        return AdmissibilityReport(False, worst, f"t_N - t_H = {worst.t_n - worst.t_h} on a sub-object")
    return AdmissibilityReport(True)


# ---------------------------------------------------------------- slopes

@dataclass
class SlopeReport:
    slopes: list
    steps: list  # [(Subobject in D-coordinates, slope)]
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.slopes)


def _span_sum(bases):
    vecs = [v for b in bases for v in b]
    return la.column_span_basis(vecs) if vecs else []


def _hn_first_step(D):
    """(slope, basis of the maximal minimizer) for one HN step."""
    lattice = enumerate_subobjects(D)
    nz = lattice.nonzero()
    if lattice.kind == "scalar":
        # mu is minimal on the top filtration step; maximal minimizer is Fil^{top jump}
        jumps = D.jump_multiset()
        top = max(jumps)
        basis = [v for v, h in adapted_basis(D) if h == top]
        sub = _sub(D, basis)
        return sub.mu, basis
    s = min(x.mu for x in nz)
    minimizers = [x for x in nz if x.mu == s]
    join = _span_sum([x.basis for x in minimizers])
    joined = _sub(D, join)
    if joined.mu != s:
        raise HNJoinFailure(f"join of minimizers has mu {joined.mu}, expected {s}")
    return s, join


def _literal_irreducible_slope(D):
    lattice = enumerate_subobjects(D)
    if lattice.kind != "eigenlines":
        return None
    nz = lattice.nonzero()
    irreducible = [x for x in nz
                   if not any(0 < y.dim < x.dim and all(la.in_span(b, x.basis) for b in y.basis)
                              for y in nz)]
    return min(x.mu for x in irreducible) if irreducible else None


def hn_slopes(D):
    slopes, steps, notes = [], [], []
    literal = _literal_irreducible_slope(D) if D.dim else None
    done = []  # vectors in D coordinates spanning the current step
    current, lift = D, la.identity(D.dim)  # lift: columns = quotient basis vectors in D coords
    first = True
    while current.dim:
        s, basis = _hn_first_step(current)
        if first and literal is not None and literal != s:
            notes.append(f"minimal irreducible sub-object slope {literal} differs from HN slope {s}")
        first = False
        lifted = [_lift(lift, v) for v in basis]
        done = _span_sum([done, lifted]) if done else la.column_span_basis(lifted)
        slopes.extend([s] * len(basis))
        sub = _sub(D, done)
        steps.append((sub, s))
        current, comp = quotient(current, basis)
        lift = [_lift(lift, c) for c in comp]
    return SlopeReport(slopes, steps, notes)


def _lift(lift, v):
    """Map quotient coordinates back to D coordinates through the lift columns."""
    out = [Fraction(0)] * len(lift[0])
    for coef, col in zip(v, lift):
        if coef:
            out = [a + coef * b for a, b in zip(out, col)]
    return out


def newton_slopes(phi, p):
    """Valuations of the eigenvalues of phi and, when the decomposition is defined over Q,
    a slope-adapted basis [(vector, slope)]."""
    phi = _frac_matrix(phi)
    poly, x = _charpoly(phi)
    coeffs = [Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q))
              for c in reversed(sympy.Poly(poly.as_expr(), x).all_coeffs())]
    vals = root_valuations([(i, vp(c, p)) for i, c in enumerate(coeffs)])
    slopes = sorted(v for v, m in vals.items() for _ in range(m))
    return slopes, slope_basis(phi, p)


def slope_basis(phi, p):
    poly, x = _charpoly(phi)
    factors = sympy.factor_list(poly.as_expr())[1]
    blocks = {}
    d = len(phi)
    for g, mult in factors:
        gp = sympy.Poly(g, x)
        cs = [Fraction(int(sympy.Rational(c).p), int(sympy.Rational(c).q)) for c in reversed(gp.all_coeffs())]
        vals = root_valuations([(i, vp(c, p)) for i, c in enumerate(cs)])
        if len(vals) != 1:
            return None
        (s, _), = vals.items()
        # kernel of g(phi)^mult
        gm = la.zeros(d, d)
        power = la.identity(d)
        for c in cs:
            gm = la.madd(gm, la.mscale(power, c))
            power = la.matmul(power, phi)
        full = la.identity(d)
        for _ in range(mult):
            full = la.matmul(full, gm)
        blocks.setdefault(s, []).extend(la.nullspace(full))
    out = []
    for s in sorted(blocks):
        for v in la.column_span_basis(blocks[s]):
            out.append((v, s))
    return out
