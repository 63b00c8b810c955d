"""The functor D -> M(D) on a finite level window, and its inverse.

Sections are built in an eigenbasis of phi.  For the filtration-adapted
basis c_1..c_d with jumps h_j (reduced so that each c_j has a pivot
eigen-coordinate r_j not used by the earlier, higher-jump columns) the j-th
section is

    g_j = t^{-h_j} * sum_i c_{ij} beta_{ij} e_i,  beta_{ij}(zeta_{p^n} - 1) = (lambda_i / lambda_{r_j})^n

where beta is interpolated with partial units at the window levels, so
beta_{r_j j} = 1 and det(beta * c) is a nonzero constant.  Everything is
exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from . import linalg as la
from .errors import (
    CertificateFailure,
    NotAUnit,
    NotLocallyTrivial,
    Unsupported,
    UnsupportedShape,
    ValidationError,
    WindowTooSmall,
)
from .filtered import FilteredModule, adapted_basis, rational_eigen, eigenvector, validate
from .local_fields import AtLeast, TSeries, cyclotomic_field, vp
from .robba import (
    LogRobbaElement,
    RobbaElement,
    frobenius,
    gamma_act,
    invert_unit,
    iota,
    log_operators,
    ord_estimate,
    partial_unit,
)


# ---------------------------------------------------------------- N = 0 frame

def nzero_frame(D, profile):
    """Vectors hat e_i = sum_k ((p-1)/p)^k / k! l_X^k N^k(e_i), coordinates in LogRobbaElement."""
    p, d = D.p, D.dim
    c = Fraction(p - 1, p)
    frame = []
    for i in range(d):
        coords = [[RobbaElement(profile)] for _ in range(d)]
        vec = [Fraction(int(i == j)) for j in range(d)]
        k = 0
        while any(vec):
            scale = c ** k / factorial(k)
            for j in range(d):
                if vec[j]:
                    while len(coords[j]) <= k:
                        coords[j].append(RobbaElement(profile))
                    coords[j][k] = coords[j][k] + RobbaElement.constant(profile, scale * vec[j])
            vec = la.matvec(D.nmat, vec)
            k += 1
        frame.append([LogRobbaElement(profile, cs) for cs in coords])
    return frame


def total_monodromy(vec, D):
    """N on B[l_X] (x) D applied to a coordinate vector: N(F_j) e_j + F_j N(e_j)."""
    d = D.dim
    out = [log_operators("N", F) for F in vec]
    for j in range(d):
        for i in range(d):
            if D.nmat[i][j]:
                out[i] = out[i] + vec[j] * D.nmat[i][j]
    return out


# ---------------------------------------------------------------- lattices

@dataclass
class LatticeFamily:
    """M_n = span_{K_n[[t]]} of the columns of Phi^n C diag(t^{-h})."""

    D: FilteredModule
    profile: object
    C: list  # columns (filtration-adapted basis), e-coordinates
    h: list

    def twist(self, n):
        phin = _matpow(self.D.phi, n)
        return la.matmul(phin, la.from_columns(self.C))

    def coordinates(self, n, column):
        """diag(t^h) (Phi^n C)^{-1} v for a column of TSeries (level n)."""
        inv = la.inverse(self.twist(n))
        out = []
        for i in range(len(self.h)):
            acc = None
            for k, v in enumerate(column):
                if inv[i][k]:
                    term = v * inv[i][k]
                    acc = term if acc is None else acc + term
            if acc is None:
                acc = TSeries.zero(cyclotomic_field(self.D.p, n), self.profile.T + self.h[i])
            out.append(acc.shift(self.h[i]))
        return out

    def contains(self, n, column):
        return all(_nonneg(c.valuation()) for c in self.coordinates(n, column))

    def generated_by(self, n, columns):
        """(contained, generates): the columns lie in M_n and span it over K_n[[t]]."""
        A = la.transpose([self.coordinates(n, col) for col in columns])
        contained = all(_nonneg(x.valuation()) for row in A for x in row)
        if not contained:
            return False, False, A
        det = la.det_expand(A)
        return True, det.valuation() == 0, A

    def phi_compatible(self):
        """Phi (Phi^n C) = Phi^{n+1} C on the window."""
        levels = list(self.profile.levels)
        return all(la.matmul(self.D.phi, self.twist(n)) == self.twist(n + 1) for n in levels[:-1])


def _nonneg(v):
    return isinstance(v, AtLeast) or v >= 0


def _matpow(m, n):
    out = la.identity(len(m))
    for _ in range(n):
        out = la.matmul(out, m)
    return out


def build_lattices(D, profile):
    adapted = adapted_basis(D)
    return LatticeFamily(D, profile, [v for v, _ in adapted], [h for _, h in adapted])


# ---------------------------------------------------------------- gluing

def eigen_frame(D):
    """(columns of an eigenbasis, eigenvalues) for the supported shapes."""
    if D.is_scalar_phi():
        return [list(v) for v in la.identity(D.dim)], [D.phi[0][0]] * D.dim
    pairs, split = rational_eigen(D.phi)
    if not split or any(m > 1 for _, m in pairs):
        raise UnsupportedShape("phi must be scalar or have distinct rational eigenvalues")
    cols, lams = [], []
    for lam, _ in pairs:
        v = eigenvector(D.phi, lam)[0]
        cols.append(v)
        lams.append(lam)
    return cols, lams


@lru_cache(maxsize=None)
def _interpolant(ratio, w, profile):
    """Polynomial beta with iota_n(beta) = ratio^n mod t^w at every window level."""
    if ratio == 1:
        return RobbaElement.constant(profile, 1)
    acc = RobbaElement(profile)
    for n in profile.levels:
        acc = acc + partial_unit(n, w, profile).scale(ratio ** n)
    return acc


def _reduce_columns(cols, h, lams, p):
    """Parabolic column reduction with pivot rows; returns (columns, pivots)."""
    cols = [list(c) for c in cols]
    pivots = []
    for k in range(len(cols)):
        for j, r in enumerate(pivots):
            if cols[k][r]:
                f = cols[k][r] / cols[j][r]
                cols[k] = [a - f * b for a, b in zip(cols[k], cols[j])]
        candidates = [r for r in range(len(cols[k])) if cols[k][r] and r not in pivots]
        # prefer the eigenline whose slope is closest to the jump (smallest diagonal distortion)
        r = min(candidates, key=lambda r: (abs(vp(lams[r], p) - h[k]), r))
        pivots.append(r)
    return cols, pivots


@dataclass
class PhiGammaModule:
    D: FilteredModule
    profile: object
    frame: list
    sections: list  # columns: lists of RobbaElement (e-coordinates)
    phi_matrix: list
    gamma_matrix: list | None = None
    gamma_exponent: int | None = None
    inverse_sections: list | None = None  # rows: G^{-1}
    h: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def rank(self):
        return len(self.sections)

    def section_matrix(self):
        return la.transpose(self.sections)


def _shift_matrix_entries(mat, h, scale_cols):
    """Entry (i, k) -> entry * t^{h_i - h_k} * scale_cols[k]."""
    d = len(mat)
    return [[mat[i][k].shift_t(h[i] - h[k]).scale(scale_cols[k]) for k in range(d)] for i in range(d)]


def default_gamma_exponent(p):
    """Smallest integer a >= 2 prime to p; integer exponents keep gamma exact."""
    return 3 if p == 2 else 2


def _degree(f):
    ks = f.x_exponents()
    return max(ks) if ks else 0


def required_kmax(D, profile, w_extra=0, gamma=True):
    """Least kmax for which glue and verify_module run without leaving the window."""
    h = [hh for _, hh in adapted_basis(D)]
    w = max(1, max(h) - min(h)) + w_extra
    degs = [_degree(partial_unit(n, w, profile.with_(kmax=10 ** 6))) for n in profile.levels]
    deg = max(degs) if len(set(eigen_frame(D)[1])) > 1 else 0
    grow = max(profile.p, default_gamma_exponent(profile.p) if gamma else 1)
    return max(profile.p * profile.T, (D.dim - 1 + grow) * deg)


def sized_profile(D, profile, w_extra=0):
    """``profile`` enlarged (never shrunk) so that glue, verify and recover fit the windows."""
    h = [hh for _, hh in adapted_basis(D)]
    T = max(profile.T, 2 * (max(h) - min(h)) + 4)
    prof = profile.with_(T=T, kmax=max(profile.kmax, profile.p * T))
    return prof.with_(kmax=max(prof.kmax, required_kmax(D, prof, w_extra)))


def glue(D, profile, w_extra=0, gamma=True):
    """Sections, phi-matrix and (optionally) gamma-matrix of M(D) on the window."""
    bad = validate(D)
    if bad:
        raise ValidationError("; ".join(map(str, bad)))
    if any(x for row in D.nmat for x in row):
        raise Unsupported("gluing is implemented for N = 0 only")
    if D.p != profile.p:
        raise ValidationError("module and profile use different primes")
    need = required_kmax(D, profile, w_extra, gamma)
    if need > profile.kmax:
        raise WindowTooSmall(f"this module needs kmax >= {need} (window has {profile.kmax})")
    p, d = D.p, D.dim
    E, lams = eigen_frame(D)
    lattice = build_lattices(D, profile)
    einv = la.inverse(la.from_columns(E))
    ce = [la.matvec(einv, c) for c in lattice.C]
    h = lattice.h
    ce, pivots = _reduce_columns(ce, h, lams, p)
    w = max(1, max(h) - min(h)) + w_extra
    zero = RobbaElement(profile)
    V = [[zero] * d for _ in range(d)]
    for k in range(d):
        for i in range(d):
            if ce[k][i]:
                beta = _interpolant(lams[i] / lams[pivots[k]], w, profile)
                V[i][k] = beta.scale(ce[k][i])
    # sections in e-coordinates: E V diag(t^{-h})
    Emat = la.from_columns(E)
    EV = [[_lin(Emat[a], [V[i][k] for i in range(d)], profile) for k in range(d)] for a in range(d)]
    sections = [[EV[a][k].shift_t(-h[k]) for a in range(d)] for k in range(d)]
    detV = la.det_expand(V)
    if detV.t_powers() == [0] and set(detV.t_part(0)) == {0}:
        inv_det = RobbaElement.constant(profile, 1 / detV.t_part(0)[0])
    else:
        try:
            inv_det = invert_unit(detV)
        except NotAUnit as exc:
            raise CertificateFailure(f"determinant of the interpolation matrix is not a unit: {exc}")
    Vinv = [[x * inv_det for x in row] for row in la.adjugate(V)]
    lam_phiV = [[frobenius(V[i][k]).scale(lams[i]) for k in range(d)] for i in range(d)]
    core = la.matmul(Vinv, lam_phiV)
    P = _shift_matrix_entries(core, h, [Fraction(p) ** (-hk) for hk in h])
    G_inv = [[_lin_rows(Vinv[k], einv, a, profile).shift_t(h[k]) for a in range(d)] for k in range(d)]
    module = PhiGammaModule(
        D, profile, frame=nzero_frame(D, profile), sections=sections, phi_matrix=P,
        inverse_sections=G_inv, h=list(h),
        diagnostics={"pivots": pivots, "w": w, "eigenvalues": lams, "eigenbasis": E,
                     "lattice_basis": [la.matvec(la.from_columns(E), c) for c in ce],
                     "kappa": [lams[pivots[k]] * Fraction(p) ** (-h[k]) for k in range(d)]})
    if gamma:
        a = default_gamma_exponent(p)
        gV = [[gamma_act(V[i][k], a) for k in range(d)] for i in range(d)]
        module.gamma_matrix = _shift_matrix_entries(la.matmul(Vinv, gV), h,
                                                    [Fraction(a) ** (-hk) for hk in h])
        module.gamma_exponent = a
    det_slope_certificate(module)
    return module


def _lin(row, elems, profile):
    acc = RobbaElement(profile)
    for c, x in zip(row, elems):
        if c:
            acc = acc + x.scale(c)
    return acc


def _lin_rows(vinv_row, einv, a, profile):
    """(V^{-1} E^{-1})_{k a} = sum_i Vinv[k][i] * einv[i][a]."""
    acc = RobbaElement(profile)
    for i, x in enumerate(vinv_row):
        if einv[i][a]:
            acc = acc + x.scale(einv[i][a])
    return acc


# ---------------------------------------------------------------- certificates

def det_slope_certificate(M):
    """s with det(phi-matrix) = p^s * u, u a certified window unit of order 0."""
    det = la.det_expand(M.phi_matrix)
    p = M.profile.p
    if det.is_zero():
        raise CertificateFailure("phi-matrix is singular")
    if any(j != 0 for j in det.t_powers()):
        raise CertificateFailure("determinant keeps a t-denominator in the window")
    coeffs = det.t_part(0)
    if set(coeffs) == {0}:
        s = vp(coeffs[0], p)
        M.diagnostics["det_unit"] = coeffs[0] / Fraction(p) ** s
        return s
    candidates = sorted({vp(c, p) for c in coeffs.values()})
    for s in candidates:
        u = det.scale(Fraction(p) ** (-s))
        try:
            ui = invert_unit(u)
        except Exception:
            continue
        if ord_estimate(u).value <= 0 and ord_estimate(ui).value <= 0:
            M.diagnostics["det_unit"] = u
            return s
    raise CertificateFailure("no factorisation p^s * unit found in the window")


# ---------------------------------------------------------------- verification

@dataclass
class VerificationReport:
    checks: dict

    @property
    def ok(self):
        return all(v for v, _ in self.checks.values())

    def __str__(self):
        return "\n".join(f"{name}: {'pass' if v else 'FAIL'} {detail}" for name, (v, detail) in self.checks.items())


def iota_vector(vec, n):
    return [iota(x, n) for x in vec]


def _section_lattice_check(M, lattice, n):
    cols = [iota_vector(g, n) for g in M.sections]
    return lattice.generated_by(n, cols)


def _tdt(f):
    """t d/dt on a TSeries."""
    return TSeries(f.field, f.start, [c * (f.start + i) for i, c in enumerate(f.coeffs)], f.prec)


def horizontal_dimension(M, lattice, n):
    """dim_{K_n} of horizontal sections of K_n((t)) (x) M, by the Fuchsian recursion."""
    contained, generates, A = _section_lattice_check(M, lattice, n)
    if not (contained and generates):
        return None
    d = M.rank
    h = lattice.h
    detA = la.det_expand(A)
    adj = la.adjugate(A)
    dinv = detA.inverse()
    Ainv = [[x * dinv for x in row] for row in adj]
    dA = [[_tdt(x) for x in row] for row in A]
    first = la.matmul(Ainv, [[A[i][k] * (-h[i]) for k in range(d)] for i in range(d)])
    R = la.madd(first, la.matmul(Ainv, dA))
    field = cyclotomic_field(M.profile.p, n)
    k0, k1 = min(h) - 1, max(h) + 1
    size = k1 - k0 + 1
    zero, one = field.zero(), field.one()
    rows = []
    for k in range(k0, k1 + 1):
        for i in range(d):
            row = [zero] * (d * size)
            for m in range(0, k - k0 + 1):
                kk = k - m
                for j in range(d):
                    c = R[i][j].coefficient(m) if m < R[i][j].prec else None
                    if c is None:
                        raise NotLocallyTrivial("connection matrix known to too low t-precision")
                    if m == 0 and i == j:
                        c = c + k
                    if c:
                        row[(kk - k0) * d + j] = row[(kk - k0) * d + j] + c
            rows.append(row)
    ker = la.nullspace(rows, one=one, zero=zero)
    return len(ker)


def verify_module(M, D, profile, other=None):
    lattice = build_lattices(D, profile)
    checks = {}
    levels = list(profile.levels)
    bad_lat = []
    for n in levels:
        contained, generates, _ = _section_lattice_check(M, lattice, n)
        if not (contained and generates):
            bad_lat.append({"level": n, "contained": contained, "generates": generates})
    checks["lattice"] = (not bad_lat, bad_lat)

    bad_phi = []
    if not lattice.phi_compatible():
        bad_phi.append("lattice family not transported by Phi")
    for n in levels[:-1]:
        for k, g in enumerate(M.sections):
            pg = [frobenius(x) for x in g]
            lhs = [iota(_lin(D.phi[a], pg, profile), n + 1) for a in range(D.dim)]
            rhs = [iota(_lin(D.phi[a], g, profile), n).embed(n + 1) for a in range(D.dim)]
            if any(not (x - y).is_zero() for x, y in zip(lhs, rhs)):
                bad_phi.append({"section": k, "level": n})
    for n in levels[1:]:
        mat = [[iota(x, n) for x in row] for row in M.phi_matrix]
        integral = all(_nonneg(x.valuation()) for row in mat for x in row)
        if not integral or la.det_expand(mat).valuation() != 0:
            bad_phi.append({"phi_matrix_not_invertible_at": n})
    checks["phi_compatibility"] = (not bad_phi, bad_phi)

    bad_gamma = []
    a = M.gamma_exponent or default_gamma_exponent(profile.p)
    for n in levels:
        for k, g in enumerate(M.sections):
            col = [iota(gamma_act(x, a), n) for x in g]
            if not lattice.contains(n, col):
                bad_gamma.append({"section": k, "level": n})
    checks["gamma_stability"] = (not bad_gamma, bad_gamma)

    bad_triv = []
    for n in levels:
        dim = horizontal_dimension(M, lattice, n)
        if dim != M.rank:
            bad_triv.append({"level": n, "horizontal_dim": dim})
    checks["local_triviality"] = (not bad_triv, bad_triv)

    if other is not None:
        checks["uniqueness"] = same_span(M, other, profile)
    return VerificationReport(checks)


def same_span(M1, M2, profile):
    """Both section families generate the same K_n[[t]]-lattice at every window level."""
    bad = []
    for n in profile.levels:
        # coordinates of M2's sections in terms of M1's: iota_n(G1^{-1}) iota_n(G2)
        ginv = [[iota(x, n) for x in row] for row in M1.inverse_sections]
        g2 = la.transpose([iota_vector(g, n) for g in M2.sections])
        coords = la.matmul(ginv, g2)
        ok = all(_nonneg(x.valuation()) for row in coords for x in row)
        ok = ok and la.det_expand(coords).valuation() == 0
        if not ok:
            bad.append(n)
    return (not bad, {"levels_differing": bad})


# ---------------------------------------------------------------- recovery

def recover_filtered(M, profile, level=None):
    """Filtered module read off from the sections and the phi-matrix."""
    D, p, d = M.D, profile.p, M.rank
    n = level or profile.n0
    lattice = build_lattices(D, profile)
    if horizontal_dimension(M, lattice, n) != d:
        raise NotLocallyTrivial(f"horizontal sections at level {n} do not span")
    if M.inverse_sections is None:
        raise NotLocallyTrivial("module carries no inverse frame")
    # horizontal sections are the constant vectors; phi on them through the phi-matrix
    G = la.transpose(M.sections)
    phi_rec = []
    for j in range(d):
        x = [M.inverse_sections[k][j] for k in range(d)]
        px = [frobenius(v) for v in x]
        Ppx = [_lin_elems(M.phi_matrix[k], px, profile) for k in range(d)]
        img = [_lin_elems(G[a], Ppx, profile) for a in range(d)]
        col = []
        for v in img:
            if v.t_powers() not in ([], [0]) or any(k != 0 for k in v.t_part(0)):
                raise NotLocallyTrivial("phi does not preserve the constant sections")
            col.append(v.t_part(0).get(0, Fraction(0)))
        phi_rec.append(col)
    phi_mat = la.from_columns(phi_rec)
    # Fil^i = { c : iota_n(G^{-1}) Phi^n c in t^i K_n[[t]]^d }
    W = la.matmul([[iota(x, n) for x in row] for row in M.inverse_sections], _matpow(phi_mat, n))
    lo = min(_val(x) for row in W for x in row)
    lo = min(lo, 0)
    fil = {}
    i = lo
    while True:
        rows = []
        for r in range(d):
            for m in range(lo, i):
                for c in range(cyclotomic_field(p, n).e):
                    rows.append([_coeff(W[r][k], m, c) for k in range(d)])
        basis = la.nullspace(rows, ncols=d) if rows else [list(v) for v in la.identity(d)]
        fil[i] = basis
        if not basis:
            break
        i += 1
        if i > lo + profile.T:
            raise NotLocallyTrivial("filtration does not terminate inside the t-window")
    filtration = []
    for i in sorted(fil):
        if i + 1 in fil and len(fil[i]) > len(fil[i + 1]):
            filtration.append((i, fil[i]))
    return FilteredModule(p, phi_mat, la.zeros(d, d), filtration)


def _val(x):
    v = x.valuation()
    return v.bound if isinstance(v, AtLeast) else v


def _coeff(series, m, c):
    if m < series.start:
        return Fraction(0)
    return series.coefficient(m).coeffs[c]


def _lin_elems(row, elems, profile):
    acc = RobbaElement(profile)
    for a, b in zip(row, elems):
        acc = acc + a * b
    return acc


def same_filtered(D1, D2):
    """Equality up to the identity change of frame: phi, N, and every Fil^i."""
    if D1.dim != D2.dim or D1.phi != D2.phi or D1.nmat != D2.nmat:
        return False
    if sorted(D1.jump_multiset()) != sorted(D2.jump_multiset()):
        return False
    idx = set(D1.relevant_indices()) | set(D2.relevant_indices())
    for i in idx:
        a, b = D1.fil(i), D2.fil(i)
        if la.span_dim(a) != la.span_dim(b):
            return False
        if a and la.span_dim(a + b) != la.span_dim(a):
            return False
    return True


def embeds(sub_module, basis, D, profile):
    """Sections of M(D') mapped through basis lie in M(D) at every window level."""
    lattice = build_lattices(D, profile)
    B = la.from_columns(basis)
    for g in sub_module.sections:
        vec = [_lin(B[a], g, profile) for a in range(D.dim)]
        for n in profile.levels:
            if not lattice.contains(n, iota_vector(vec, n)):
                return False
    return True


def perturb_section(M, k, extra):
    """Copy of M with ``extra`` (a coordinate vector) added to section k."""
    sections = [list(g) for g in M.sections]
    sections[k] = [x + y for x, y in zip(sections[k], extra)]
    return PhiGammaModule(M.D, M.profile, M.frame, sections, M.phi_matrix, M.gamma_matrix,
                          M.gamma_exponent, None, M.h, dict(M.diagnostics))
