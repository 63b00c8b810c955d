"""Membership test for the overconvergent lattice inside B[l_X, 1/t] (x) D.

A candidate is a coordinate vector x_1..x_d (LogRobbaElement) on a basis
e_1..e_d adapted to the Frobenius slopes.  Three conditions are checked:
the monodromy equation, the lattice condition at every window level read
through the matrices P^(n) (phi^{-n}(e_i) on a filtration-adapted basis
f_j), and the growth bound ord(x_i) <= -slope(e_i).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg as la
from .errors import Unsupported, ValidationError
from .filtered import FilteredModule, adapted_basis, is_admissible, slope_basis, validate
from .local_fields import AtLeast
from .robba import LogRobbaElement, RobbaElement, log_operators, ord_estimate, zero_order


@dataclass
class SemistableData:
    base: FilteredModule
    slope_basis: list  # columns in D coordinates
    slopes: list
    nmat: list  # N on the slope basis (column convention)
    phi: list  # phi on the slope basis
    dr_basis: list  # columns of f_j in slope-basis coordinates
    t_h: list  # t_H(f_j)

    @property
    def dim(self):
        return self.base.dim

    @property
    def change(self):
        return la.from_columns(self.dr_basis)

    @classmethod
    def from_module(cls, D):
        bad = validate(D)
        if bad:
            raise ValidationError("; ".join(map(str, bad)))
        if not is_admissible(D):
            raise ValidationError("semistable data needs an admissible filtered module")
        sb = slope_basis(D.phi, D.p)
        if sb is None:
            raise Unsupported("slope decomposition of phi is not defined over Q")
        S = la.from_columns([v for v, _ in sb])
        Sinv = la.inverse(S)
        phi_e = la.matmul(Sinv, la.matmul(D.phi, S))
        n_e = la.matmul(Sinv, la.matmul(D.nmat, S))
        adapted = adapted_basis(D)
        f_cols = [la.matvec(Sinv, v) for v, _ in adapted]
        return cls(D, [v for v, _ in sb], [s for _, s in sb], n_e, phi_e, f_cols, [h for _, h in adapted])


def p_matrices(data, n):
    """P^(n) with phi^{-n}(e_i) = sum_j P[j][i] f_j."""
    phin = la.identity(data.dim)
    phinv = la.inverse(data.phi)
    for _ in range(n):
        phin = la.matmul(phin, phinv)
    return la.matmul(la.inverse(data.change), phin)


@dataclass
class MembershipVerdict:
    cond1: tuple
    cond2: dict  # level -> (passed, witness)
    cond3: list  # per index (passed, ord value)
    notes: list = field(default_factory=list)

    @property
    def member(self):
        return self.cond1[0] and all(v for v, _ in self.cond2.values()) and all(v for v, _ in self.cond3)

    def summary(self):
        lines = [f"member: {str(self.member).lower()}",
                 f"cond1 (monodromy): {'pass' if self.cond1[0] else 'fail'} {self.cond1[1] or ''}".rstrip()]
        for n, (v, w) in sorted(self.cond2.items()):
            lines.append(f"cond2 level {n}: {'pass (window-limited)' if v else 'fail'} {w or ''}".rstrip())
        for i, (v, o) in enumerate(self.cond3):
            lines.append(f"cond3 index {i}: {'pass (window-limited)' if v else 'fail'} ord = {o}")
        return "\n".join(lines + self.notes)


def _as_log(x, profile):
    if isinstance(x, LogRobbaElement):
        return x
    if isinstance(x, RobbaElement):
        return LogRobbaElement.lift(x)
    return LogRobbaElement.lift(RobbaElement.constant(profile, x))


def _cond1(x, data):
    bad = []
    for j in range(data.dim):
        acc = log_operators("N", x[j])
        for i in range(data.dim):
            if data.nmat[j][i]:
                acc = acc + x[i] * data.nmat[j][i]
        if not acc.is_zero():
            bad.append(j)
    return (not bad, {"indices": bad} if bad else None)


def _ord_ok(value, bound):
    return value <= bound if not isinstance(value, float) else value <= bound + 1e-12


def _cond3(x, data):
    out = []
    for i in range(data.dim):
        est = ord_estimate(x[i])
        out.append((_ord_ok(est.value, -data.slopes[i]), est.value))
    return out


def membership(x, data, profile):
    x = [_as_log(v, profile) for v in x]
    if len(x) != data.dim:
        raise ValidationError(f"candidate has {len(x)} coordinates, module has rank {data.dim}")
    cond2 = {}
    for n in profile.levels:
        P = p_matrices(data, n)
        images = [log_operators("iota", xi, n) for xi in x]
        bad = []
        for j in range(data.dim):
            terms = {}
            for i in range(data.dim):
                if not P[j][i]:
                    continue
                for k, s in enumerate(images[i].coeffs):
                    terms[k] = terms[k] + s * P[j][i] if k in terms else s * P[j][i]
            for k, s in terms.items():
                v = s.valuation()
                if not isinstance(v, AtLeast) and v < -data.t_h[j]:
                    bad.append({"j": j, "log_power": k, "t_valuation": v, "bound": -data.t_h[j]})
        cond2[n] = (not bad, bad or None)
    return MembershipVerdict(_cond1(x, data), cond2, _cond3(x, data))


def zero_order_form(x, data, profile):
    """Same verdict with the lattice condition read as zero orders at zeta_{p^n} - 1."""
    if any(v for row in data.nmat for v in row):
        raise Unsupported("zero-order form applies to N = 0 data")
    logs = [_as_log(v, profile) for v in x]
    if any(v.degree > 0 for v in logs):
        raise Unsupported("zero-order form needs l_X-free candidates")
    plain = [v.coefficient(0) for v in logs]
    cond2 = {}
    for n in profile.levels:
        P = p_matrices(data, n)
        bad = []
        for j in range(data.dim):
            y = RobbaElement(profile)
            for i in range(data.dim):
                if P[j][i]:
                    y = y + plain[i].scale(P[j][i])
            z = zero_order(y, n)
            if not isinstance(z, AtLeast) and z < -data.t_h[j]:
                bad.append({"j": j, "zero_order": z, "bound": -data.t_h[j]})
        cond2[n] = (not bad, bad or None)
    return MembershipVerdict(_cond1(logs, data), cond2, _cond3(logs, data))
