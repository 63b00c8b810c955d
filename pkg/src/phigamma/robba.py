"""Windowed model of the Robba ring over Q_p and of its extension by l_X.

An element is a finite sum  sum a_{k,j} X^k t^j  with rational a_{k,j},
where t = log(1+X) is kept as an independent transcendental atom.  This
makes t-denominators native and lets phi, gamma, the derivations and the
localisations iota_n use the exact rules phi(t) = p t, gamma(t) = a t,
d(t) = 1 and iota_n(t) = p^{-n} t instead of summing the log series.
``x_series`` expands t back into powers of X inside the window.

Coefficients are exact.  What can be lost is X-adic content outside the
window [kmin, kmax]: elements carry ``hi`` / ``lo`` marks saying that
exponents above ``hi`` (resp. below ``lo``) are unknown.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, inf

from . import _poly
from .errors import (
    LevelOutOfWindow,
    NotAUnit,
    PrecisionExhausted,
    ProfileMismatch,
    WindowOverflow,
    WindowTooSmall,
)
from .local_fields import (
    AtLeast,
    TSeries,
    cyclotomic_field,
    root_valuations,
    vp,
)


@dataclass(frozen=True)
class PrecisionProfile:
    p: int = 2
    P: int = 16
    kmin: int = -8
    kmax: int = 64
    T: int = 8
    n0: int = 1
    n1: int = 3

    def __post_init__(self):
        if self.n0 < 1 or self.n1 < self.n0:
            raise ValueError("need 1 <= n0 <= n1")
        if not self.kmin <= 0 <= self.kmax:
            raise ValueError("need kmin <= 0 <= kmax")
        if self.kmax < self.p * self.T:
            raise ValueError(f"kmax={self.kmax} must be >= p*T={self.p * self.T}")

    @property
    def levels(self):
        return range(self.n0, self.n1 + 1)

    def with_(self, **kw):
        return replace(self, **kw)

    def radius(self):
        """r with n(r) = n0, i.e. the annulus 0 < v_p(X) <= 1/(p^{n0-1}(p-1))."""
        return self.p ** (self.n0 - 1) * (self.p - 1)


def _clean(d):
    return {k: Fraction(v) for k, v in d.items() if v != 0}


def _combine(a, b):
    """Combine two optional bounds keeping the more restrictive one."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class RobbaElement:
    """sum a_{k,j} X^k t^j, known for X-exponents in (lo, hi] ... see module doc."""

    __slots__ = ("profile", "terms", "hi", "lo", "padic_prec")

    def __init__(self, profile, terms=None, hi=None, lo=None, padic_prec=None):
        self.profile = profile
        t = {}
        for (k, j), c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            if k > profile.kmax:
                hi = profile.kmax if hi is None else min(hi, profile.kmax)
                continue
            if k < profile.kmin:
                lo = profile.kmin if lo is None else max(lo, profile.kmin)
                continue
            t[(k, j)] = c
        if hi is not None:
            t = {kj: c for kj, c in t.items() if kj[0] <= hi}
        if lo is not None:
            t = {kj: c for kj, c in t.items() if kj[0] >= lo}
        self.terms = t
        self.hi = hi
        self.lo = lo
        self.padic_prec = padic_prec

    # -- constructors
    @classmethod
    def from_x_coeffs(cls, profile, coeffs, **kw):
        return cls(profile, {(k, 0): c for k, c in coeffs.items()}, **kw)

    @classmethod
    def constant(cls, profile, c):
        return cls(profile, {(0, 0): c})

    @classmethod
    def from_poly(cls, profile, poly, shift=0, tpow=0, **kw):
        return cls(profile, {(i + shift, tpow): c for i, c in enumerate(poly) if c}, **kw)

    # -- structure
    @property
    def exact(self):
        return self.hi is None and self.lo is None and self.padic_prec is None

    def is_zero(self):
        return not self.terms

    def t_powers(self):
        return sorted({j for _, j in self.terms})

    def t_part(self, j):
        """Laurent polynomial (dict k -> coeff) multiplying t^j."""
        return {k: c for (k, jj), c in self.terms.items() if jj == j}

    def x_exponents(self):
        return [k for k, _ in self.terms]

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return RobbaElement.constant(self.profile, other)
        if not isinstance(other, RobbaElement):
            return NotImplemented
        if other.profile != self.profile:
            raise ProfileMismatch(f"{self.profile} vs {other.profile}")
        return other

    # -- ring operations
    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for kj, c in other.terms.items():
            out[kj] = out.get(kj, 0) + c
        return RobbaElement(self.profile, _clean(out), _combine(self.hi, other.hi),
                            _neg_combine(self.lo, other.lo),
                            _combine(self.padic_prec, other.padic_prec))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = Fraction(c)
        return RobbaElement(self.profile, {kj: c * v for kj, v in self.terms.items()},
                            self.hi, self.lo, self.padic_prec)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        if other is NotImplemented:
            return other
        return _mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return invert_unit(self) ** (-e)
        result = RobbaElement.constant(self.profile, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RobbaElement.constant(self.profile, other)
        if not isinstance(other, RobbaElement):
            return NotImplemented
        return (self.profile == other.profile and self.terms == other.terms
                and self.hi == other.hi and self.lo == other.lo)

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def shift_t(self, j):
        """Multiply by t^j (j may be negative)."""
        return RobbaElement(self.profile, {(k, jj + j): c for (k, jj), c in self.terms.items()},
                            self.hi, self.lo, self.padic_prec)

    def x_series(self):
        """Expand t = log(1+X) and return the pure X-series in the window."""
        if any(j < 0 for j in self.t_powers()):
            raise WindowOverflow("a t-denominator has no expansion in X inside the window")
        out = RobbaElement(self.profile, {}, self.hi, self.lo, self.padic_prec)
        tser = _t_series(self.profile)
        for j in self.t_powers():
            part = RobbaElement.from_x_coeffs(self.profile, self.t_part(j), hi=self.hi, lo=self.lo)
            out = out + part * (tser ** j)
        return out

    def x_coeffs(self):
        if any(j != 0 for j in self.t_powers()):
            return self.x_series().t_part(0)
        return self.t_part(0)

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for (k, j), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
                mono = "*".join(s for s in (f"X^{k}" if k else "", f"t^{j}" if j else "") if s)
                parts.append(f"{c}" + (f"*{mono}" if mono else ""))
            body = " + ".join(parts)
        tail = []
        if self.hi is not None:
            tail.append(f"O(X^{self.hi + 1})")
        if self.lo is not None:
            tail.append(f"O(X^{self.lo - 1})")
        return body + "".join(" + " + s for s in tail)


def _neg_combine(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _mul(a, b):
    if a.is_zero() and a.exact or b.is_zero() and b.exact:
        return RobbaElement(a.profile)
    ka, kb = a.x_exponents() or [0], b.x_exponents() or [0]
    if (a.hi is not None and b.lo is not None) or (a.lo is not None and b.hi is not None):
        raise WindowOverflow("product of series truncated in opposite X-directions")
    hi = lo = None
    if a.hi is not None:
        hi = a.hi + min(kb)
    if b.hi is not None:
        hi = _combine(hi, b.hi + min(ka))
    if a.lo is not None:
        lo = a.lo + max(kb)
    if b.lo is not None:
        lo = _neg_combine(lo, b.lo + max(ka))
    prof = a.profile
    out = {}
    for (k1, j1), c1 in a.terms.items():
        for (k2, j2), c2 in b.terms.items():
            k = k1 + k2
            if k > prof.kmax:
                hi = _combine(hi, prof.kmax)
                continue
            if k < prof.kmin:
                lo = _neg_combine(lo, prof.kmin)
                continue
            key = (k, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return RobbaElement(prof, _clean(out), hi, lo, _combine(a.padic_prec, b.padic_prec))


def ring_arith(op, f, g):
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    if op == "scale":
        return f.scale(g)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------- atoms

@lru_cache(maxsize=None)
def _t_series(profile):
    """log(1+X) as an X-series truncated at kmax."""
    return RobbaElement.from_x_coeffs(
        profile, {k: Fraction((-1) ** (k + 1), k) for k in range(1, profile.kmax + 1)},
        hi=profile.kmax)


@lru_cache(maxsize=None)
def atom(name, profile, arg=None):
    """Distinguished elements: "X", "t", "q_level" (arg=n), "t_plus"/"t_minus" (arg=M)."""
    p = profile.p
    if name == "X":
        return RobbaElement(profile, {(1, 0): 1})
    if name == "t":
        return RobbaElement(profile, {(0, 1): 1})
    if name == "q_level":
        if arg is None or arg < 1:
            raise ValueError("q_level needs n >= 1")
        full = (p - 1) * p ** (arg - 1)
        poly = _poly.q_level(p, arg, profile.kmax)
        return RobbaElement.from_poly(profile, poly, hi=profile.kmax if full > profile.kmax else None)
    if name in ("t_plus", "t_minus"):
        if arg is None or arg < 1:
            raise ValueError("t_plus / t_minus need M >= 1 factors")
        # t_plus = prod phi^{2n-1}(q)/p (zeros at even levels), t_minus = prod phi^{2n-2}(q)/p
        first = 2 if name == "t_plus" else 1
        acc = [Fraction(1)]
        truncated = False
        for i in range(arg):
            level = first + 2 * i
            factor = _poly.scale(_poly.q_level(p, level, profile.kmax), Fraction(1, p))
            if len(acc) - 1 + (p - 1) * p ** (level - 1) > profile.kmax:
                truncated = True
            acc = _poly.mul(acc, factor, profile.kmax)
        return RobbaElement.from_poly(profile, acc, hi=profile.kmax if truncated else None)
    raise ValueError(f"unknown atom {name!r}")


# ---------------------------------------------------------------- phi, gamma, derivations

def _substitute(f, image_x, image_x_inv, t_factor):
    """Ring morphism X -> image_x, X^{-1} -> image_x_inv, t -> t_factor * t."""
    prof = f.profile
    out = RobbaElement(prof, {}, f.hi, f.lo, f.padic_prec)
    if f.hi is not None or f.lo is not None:
        # unknown tail stays unknown after substitution
        out = RobbaElement(prof, {}, prof.kmax if f.hi is not None else None,
                           prof.kmin if f.lo is not None else None, f.padic_prec)
    powers = {0: RobbaElement.constant(prof, 1)}

    def pw(k):
        if k not in powers:
            if k > 0:
                powers[k] = pw(k - 1) * image_x
            else:
                powers[k] = pw(k + 1) * image_x_inv
        return powers[k]

    for j in f.t_powers():
        part = f.t_part(j)
        acc = RobbaElement(prof)
        for k, c in sorted(part.items()):
            acc = acc + pw(k).scale(c)
        out = out + acc.shift_t(j).scale(Fraction(t_factor) ** j)
    return out


def _x_adic_inverse(profile, poly_shift, poly):
    """Inverse of X^shift * poly(X) with poly(0) != 0, expanded X-adically (hi-truncated)."""
    inv = [1 / poly[0]]
    for k in range(1, profile.kmax - (-poly_shift) + 1):
        acc = sum((poly[i] * inv[k - i] for i in range(1, min(k, len(poly) - 1) + 1)), Fraction(0))
        inv.append(-acc / poly[0])
    return RobbaElement.from_poly(profile, inv, shift=-poly_shift, hi=profile.kmax)


def _inverse_x_adic_dual(profile, lead_exp, coeffs_desc):
    """Inverse of X^lead * (c0 + c1 X^{-1} + ...) expanded in X^{-1} (lo-truncated)."""
    c = coeffs_desc
    inv = [1 / c[0]]
    steps = (-lead_exp) - profile.kmin
    for k in range(1, steps + 1):
        acc = sum((c[i] * inv[k - i] for i in range(1, min(k, len(c) - 1) + 1)), Fraction(0))
        inv.append(-acc / c[0])
    return RobbaElement(profile, {(-lead_exp - i, 0): v for i, v in enumerate(inv) if v},
                        lo=profile.kmin)


@lru_cache(maxsize=None)
def _phi_images(profile):
    p = profile.p
    fx = _poly.frobenius_x(p)
    image = RobbaElement.from_poly(profile, fx)
    # phi(X) = X^p (1 + sum_{i<p} C(p,i) X^{i-p}); coefficients listed from X^p downwards
    desc = [Fraction(comb(p, p - i)) for i in range(p)]
    inv = _inverse_x_adic_dual(profile, p, desc)
    return image, inv


def frobenius(f):
    """X -> (1+X)^p - 1, t -> p t, identity on coefficients."""
    image, inv = _phi_images(f.profile)
    return _substitute(f, image, inv, f.profile.p)


@lru_cache(maxsize=None)
def _gamma_images(profile, a):
    a = Fraction(a)
    if a.denominator == 1 and a >= 0:
        poly = [Fraction(comb(int(a), i)) for i in range(int(a) + 1)]
        poly[0] -= 1
        image = RobbaElement.from_poly(profile, _poly.trim(poly))
    else:
        coeffs = [Fraction(0)]
        binom = Fraction(1)
        for i in range(1, profile.kmax + 1):
            binom = binom * (a - i + 1) / i
            coeffs.append(binom)
        image = RobbaElement.from_poly(profile, coeffs, hi=profile.kmax)
    # gamma(X) = X * (a + C(a,2) X + ...)
    quotient = [image.terms.get((k, 0), Fraction(0)) for k in range(1, profile.kmax + 1)]
    inv = _x_adic_inverse(profile, 1, _poly.trim(quotient))
    return image, inv


def gamma_act(f, a):
    """X -> (1+X)^a - 1, t -> a t; ``a`` an integer or rational p-adic unit."""
    a = Fraction(a)
    if vp(a, f.profile.p) != 0:
        raise ValueError("gamma exponent must be a p-adic unit")
    if a == 1:
        return f
    image, inv = _gamma_images(f.profile, a)
    return _substitute(f, image, inv, a)


def derive(f, mode="partial"):
    """partial = (1+X) d/dX (with partial t = 1); nabla = t * partial."""
    out = {}
    for (k, j), c in f.terms.items():
        if k:
            for kk in (k - 1, k):
                out[(kk, j)] = out.get((kk, j), 0) + c * k
        if j:
            out[(k, j - 1)] = out.get((k, j - 1), 0) + c * j
    hi = f.hi - 1 if f.hi is not None else None
    res = RobbaElement(f.profile, _clean(out), hi, f.lo, f.padic_prec)
    if mode == "partial":
        return res
    if mode == "nabla":
        return res.shift_t(1)
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------- units

def invert_unit(f):
    """Inverse in the Robba ring over the annulus fixed by the profile's n0.

    Supported shapes: c * t^j * u(X) with u a Laurent polynomial whose
    expansion around the boundary is one-directional.
    """
    prof = f.profile
    if f.is_zero():
        raise NotAUnit("zero is not a unit", witness="zero")
    tp = f.t_powers()
    if len(tp) != 1:
        raise WindowOverflow("only t-monomial multiples of X-series can be inverted")
    j = tp[0]
    if j > 0:
        raise NotAUnit("t is not a unit in the Robba ring", witness={"zero_of": "t"})
    part = f.t_part(j)
    if len(part) == 1:
        (k, c), = part.items()
        return RobbaElement(prof, {(-k, -j): 1 / c})
    if not f.exact:
        raise PrecisionExhausted("cannot certify inverse of a truncated series")
    p = prof.p
    bound = Fraction(1, prof.radius())
    vals = root_valuations([(k, vp(c, p)) for k, c in part.items()])
    for v, mult in vals.items():
        if 0 < v <= bound:
            witness = {"root_valuation": v, "multiplicity": mult}
            for n in prof.levels:
                if v == Fraction(1, p ** (n - 1) * (p - 1)) and zero_order(f, n) != 0:
                    witness["level"] = n
            raise NotAUnit(f"zero of valuation {v} inside the annulus", witness=witness)
    kmin_f, kmax_f = min(part), max(part)
    # dominant monomial near the boundary: minimal v_p, ties -> smallest exponent
    dom = min(part, key=lambda k: (vp(part[k], p), k))
    inner = any(v > bound for v in vals)
    outer = any(v <= 0 for v in vals)
    if inner and outer:
        raise WindowOverflow("unit needs a two-sided expansion; not supported")
    if dom == kmin_f:
        poly = [part.get(k, Fraction(0)) for k in range(kmin_f, kmax_f + 1)]
        inv = _x_adic_inverse(prof, kmin_f, poly)
    elif dom == kmax_f:
        desc = [part.get(k, Fraction(0)) for k in range(kmax_f, kmin_f - 1, -1)]
        inv = _inverse_x_adic_dual(prof, kmax_f, desc)
    else:
        raise WindowOverflow("unit needs a two-sided expansion; not supported")
    return inv.shift_t(-j)


# ---------------------------------------------------------------- iota_n

@lru_cache(maxsize=None)
def _iota_x_inverse(p, n, prec):
    return _iota_x_series(p, n, prec).inverse()


@lru_cache(maxsize=None)
def _iota_x_series(p, n, prec):
    """iota_n(X) = zeta exp(t/p^n) - 1 modulo t^prec."""
    field = cyclotomic_field(p, n)
    zeta = field.one() + field.pi()
    coeffs = [field.pi()]
    for m in range(1, prec):
        coeffs.append(zeta * Fraction(1, p ** (n * m) * math.factorial(m)))
    return TSeries(field, 0, coeffs, prec)


def _iota_laurent(p, n, part, prec):
    """iota_n of a Laurent polynomial in X, modulo t^prec."""
    field = cyclotomic_field(p, n)
    if prec <= 0:
        return TSeries.zero(field, prec)
    pos = {k: c for k, c in part.items() if k >= 0}
    neg = {k: c for k, c in part.items() if k < 0}
    result = TSeries.zero(field, prec)
    if pos:
        poly = [pos.get(k, Fraction(0)) for k in range(max(pos) + 1)]
        b = _poly.shift_basis(poly)
        # (1+X)^k -> zeta^k exp(k t / p^n)
        q = p ** n
        coeffs = []
        for m in range(prec):
            sums = {}
            for k, bk in enumerate(b):
                if bk:
                    r = k % q
                    sums[r] = sums.get(r, 0) + bk * k ** m
            acc = field.zero()
            for r, s in sums.items():
                if s:
                    acc = acc + field.zeta_power(r) * s
            coeffs.append(acc * Fraction(1, p ** (n * m) * math.factorial(m)))
        result = TSeries(field, 0, coeffs, prec)
    if neg:
        xinv = _iota_x_inverse(p, n, prec)
        acc = TSeries.zero(field, prec)
        for k in range(min(neg), 0):
            acc = acc + TSeries.constant(field.one() * neg.get(k, 0), prec)
            acc = acc * xinv
        result = result + acc
    return result


def iota(f, n, allow_truncated=False):
    """iota_n(f) in K_n((t)) modulo t^T (absolute)."""
    prof = f.profile
    if n not in prof.levels:
        raise LevelOutOfWindow(f"level {n} outside [{prof.n0}, {prof.n1}]")
    if not f.exact and not allow_truncated:
        raise PrecisionExhausted("iota of a window-truncated series is not determined")
    p, T = prof.p, prof.T
    field = cyclotomic_field(p, n)
    powers = f.t_powers()
    lowest = min(powers) if powers else 0
    result = TSeries.zero(field, T)
    if lowest < 0:
        result = TSeries(field, lowest, [], T)
    for j in powers:
        if j >= T:
            continue
        inner = _iota_laurent(p, n, f.t_part(j), T - j)
        result = result + inner.shift(j) * (Fraction(1, p ** n) ** j)
    return result


def zero_order(f, n):
    """t-adic valuation of iota_n(f); an AtLeast marker when >= T."""
    return iota(f, n).valuation()


# ---------------------------------------------------------------- partial units

@lru_cache(maxsize=None)
def partial_unit(n, w, profile):
    """u with iota_n(u) = 1 mod t^w and iota_m(u) = 0 mod t^w for the other window levels."""
    if n not in profile.levels:
        raise LevelOutOfWindow(f"level {n} outside the window")
    if w < 1:
        raise ValueError("w must be >= 1")
    p = profile.p
    others = [1]
    for m in profile.levels:
        if m != n:
            others = _poly.mul(others, _poly.power(_poly.q_level(p, m), w))
    modulus = _poly.power(_poly.q_level(p, n), w)
    s = _poly.inverse_mod(others, modulus)
    u = _poly.mul(others, s)
    if len(u) - 1 > profile.kmax:
        raise WindowTooSmall(f"partial unit of degree {len(u) - 1} exceeds kmax={profile.kmax}")
    return RobbaElement.from_poly(profile, u)


def interpolation_series(values, profile):
    """sum_n values[n] * t_{n,1}: takes the prescribed value at zeta_{p^n} - 1."""
    missing = [n for n in profile.levels if n not in values]
    if missing:
        raise ValueError(f"values missing for levels {missing}")
    acc = RobbaElement(profile)
    for n in profile.levels:
        acc = acc + partial_unit(n, 1, profile).scale(Fraction(values[n]))
    return acc


def interpolate_matrices(mats, w, profile):
    """Polynomial matrix U with iota_n(U) = mats[n] mod t^w (entries rational)."""
    rows, cols = len(next(iter(mats.values()))), len(next(iter(mats.values()))[0])
    out = [[RobbaElement(profile) for _ in range(cols)] for _ in range(rows)]
    for n in profile.levels:
        u = partial_unit(n, w, profile)
        for i in range(rows):
            for j in range(cols):
                if mats[n][i][j]:
                    out[i][j] = out[i][j] + u.scale(mats[n][i][j])
    return out


# ---------------------------------------------------------------- order

@dataclass(frozen=True)
class OrdEstimate:
    value: object  # Fraction, float or -inf
    tag: str = "window-limited"

    def __str__(self):
        return f"ord = {self.value} ({self.tag})"

    def __le__(self, other):
        return _ord_le(self.value, other)


def _ord_le(a, b, tol=1e-12):
    if a == -inf:
        return True
    return a <= b or (isinstance(a, float) and a <= b + tol)


def _growth_order(coeffs, p):
    """Windowed coefficient-growth order of a pure X-series (dict k -> a_k)."""
    c0 = min(0, vp(coeffs.get(0, 0), p), vp(coeffs.get(1, 0), p))
    best = Fraction(0)  # exact when attained at some i = p^m, else a float
    for i, a in coeffs.items():
        if i < 2 or a == 0:
            continue
        num = c0 - vp(a, p)
        m = vp_int_pow(i, p)
        cand = Fraction(num, m) if m is not None else num / math.log(i, p)
        if float(cand) > float(best) + 1e-12 or (float(cand) >= float(best) - 1e-12 and isinstance(cand, Fraction)
                                                 and not isinstance(best, Fraction)):
            best = cand
    return best


def vp_int_pow(i, p):
    """m if i = p^m else None."""
    m = 0
    while i % p == 0:
        i //= p
        m += 1
    return m if i == 1 and m > 0 else None


def _element_order(f):
    """max over t-powers j of growth(c_j) + j; -inf for zero."""
    best = -inf
    for j in f.t_powers():
        val = _growth_order(f.t_part(j), f.profile.p) + j
        if best == -inf or val > best:
            best = val
    return best


def ord_estimate(f):
    """Window-limited estimate of ord(f) for RobbaElement or LogRobbaElement."""
    if isinstance(f, LogRobbaElement):
        best = -inf
        for i, c in enumerate(f.coeffs):
            if c.is_zero():
                continue
            val = _element_order(c) + i
            if best == -inf or val > best:
                best = val
        return OrdEstimate(best)
    return OrdEstimate(_element_order(f))


# ---------------------------------------------------------------- l_X extension

class LogRobbaElement:
    """sum_i c_i l_X^i with c_i RobbaElements (t-denominators allowed)."""

    __slots__ = ("profile", "coeffs")

    def __init__(self, profile, coeffs):
        self.profile = profile
        cs = list(coeffs)
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def lift(cls, f):
        return cls(f.profile, [f])

    @classmethod
    def lx(cls, profile):
        return cls(profile, [RobbaElement(profile), RobbaElement.constant(profile, 1)])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def t_denominator(self):
        js = [j for c in self.coeffs for j in c.t_powers()]
        return max(0, -min(js)) if js else 0

    def coefficient(self, i):
        return self.coeffs[i] if i < len(self.coeffs) else RobbaElement(self.profile)

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def __add__(self, other):
        if isinstance(other, RobbaElement):
            other = LogRobbaElement.lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LogRobbaElement(self.profile, [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return LogRobbaElement(self.profile, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LogRobbaElement(self.profile, [c.scale(other) for c in self.coeffs])
        if isinstance(other, RobbaElement):
            return LogRobbaElement(self.profile, [c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return LogRobbaElement(self.profile, [])
        out = [RobbaElement(self.profile) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return LogRobbaElement(self.profile, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, RobbaElement):
            other = LogRobbaElement.lift(other)
        if not isinstance(other, LogRobbaElement):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return all(self.coefficient(i) == other.coefficient(i) for i in range(n))

    def __repr__(self):
        return " + ".join(f"({c})*lX^{i}" for i, c in enumerate(self.coeffs)) or "0"


@lru_cache(maxsize=None)
def log_phi_correction(profile):
    """log(phi(X)/X^p), a series in X^{-1} with p-divisible coefficients."""
    p = profile.p
    # phi(X)/X^p = 1 + h, h = sum_{i=1}^{p-1} C(p, p-i) X^{-i}
    h = RobbaElement(profile, {(-i, 0): comb(p, p - i) for i in range(1, p)})
    return _log_one_plus(h, profile)


def _log_one_plus(h, profile):
    acc = RobbaElement(profile)
    power = RobbaElement.constant(profile, 1)
    steps = profile.kmax - profile.kmin + 1
    for m in range(1, steps + 1):
        power = power * h
        if power.is_zero():
            break
        acc = acc + power.scale(Fraction((-1) ** (m + 1), m))
    lo = profile.kmin if any(k < 0 for k in h.x_exponents()) else None
    hi = profile.kmax if any(k > 0 for k in h.x_exponents()) else None
    return RobbaElement(profile, acc.terms, hi=_combine(acc.hi, hi), lo=_neg_combine(acc.lo, lo))


def padic_log_rational(a, p, prec):
    """Rational approximation of the p-adic log of a unit a, correct modulo p^prec."""
    a = Fraction(a)
    k = 1
    b = a
    target = 2 if p == 2 else 1
    # make b = 1 mod p (mod 4 for p = 2): log(a) = log(a^k)/k
    while vp(b - 1, p) < target:
        b *= a
        k += 1
    x = b - 1
    acc = Fraction(0)
    power = Fraction(1)
    m = 1
    while True:
        power *= x
        term = power / m
        if vp(term, p) >= prec + 2 * max(1, math.ceil(math.log(m + 1, p))) and m > prec:
            break
        acc += term * (-1) ** (m + 1)
        m += 1
    return acc / k


@lru_cache(maxsize=None)
def log_gamma_correction(profile, a):
    """log(gamma(X)/X) = log(a) + log(1 + sum_{i>=1} C(a, i+1)/a X^i)."""
    a = Fraction(a)
    image, _ = _gamma_images(profile, a)
    quotient = {k - 1: c / a for (k, j), c in image.terms.items() if k >= 2}
    h = RobbaElement.from_x_coeffs(profile, quotient, hi=image.hi)
    series = _log_one_plus(h, profile)
    const = padic_log_rational(a, profile.p, profile.P)
    padic = profile.P if const != 0 else None
    return RobbaElement(profile, (series + RobbaElement.constant(profile, const)).terms,
                        hi=series.hi, lo=series.lo, padic_prec=padic)


def _log_substitute(F, image_l, op):
    """Apply the ring morphism op on coefficients and l_X -> image_l."""
    out = LogRobbaElement(F.profile, [])
    power = LogRobbaElement(F.profile, [RobbaElement.constant(F.profile, 1)])
    for i, c in enumerate(F.coeffs):
        if i:
            power = power * image_l
        out = out + power * op(c)
    return out


def monodromy(F):
    """N: the derivation with N(l_X) = -p/(p-1), zero on the Robba ring."""
    p = F.profile.p
    return LogRobbaElement(F.profile, [c.scale(Fraction(-p * i, p - 1))
                                       for i, c in enumerate(F.coeffs) if i])


def log_frobenius(F):
    prof = F.profile
    image = LogRobbaElement(prof, [log_phi_correction(prof), RobbaElement.constant(prof, prof.p)])
    return _log_substitute(F, image, frobenius)


def log_gamma(F, a):
    a = Fraction(a)
    if a == 1:
        return F
    prof = F.profile
    image = LogRobbaElement(prof, [log_gamma_correction(prof, a), RobbaElement.constant(prof, 1)])
    return _log_substitute(F, image, lambda c: gamma_act(c, a))


def log_nabla(F):
    """nabla(l_X) = t (1+X)/X, extended as a derivation."""
    prof = F.profile
    d_l = RobbaElement(prof, {(-1, 1): 1, (0, 1): 1})
    out = LogRobbaElement(prof, [derive(c, "nabla") for c in F.coeffs])
    extra = LogRobbaElement(prof, [F.coeffs[i] * d_l * i for i in range(1, len(F.coeffs))])
    return out + extra


class FormalLogSeries:
    """sum_k Lambda^k s_k with Lambda = log(pi_n) a formal constant, s_k in K_n((t))."""

    def __init__(self, level, coeffs):
        self.level = level
        self.coeffs = list(coeffs)

    def valuation(self):
        vals = [s.valuation() for s in self.coeffs]
        exact = [v for v in vals if not isinstance(v, AtLeast)]
        if exact:
            return min(exact)
        return AtLeast(min(v.bound for v in vals)) if vals else AtLeast(0)

    def __repr__(self):
        return " + ".join(f"[{s}]*Lambda^{k}" for k, s in enumerate(self.coeffs))


@lru_cache(maxsize=None)
def _iota_log_part(p, n, prec):
    """log(1 + zeta (exp(t/p^n) - 1)/pi_n), the t-dependent part of iota_n(l_X)."""
    field = cyclotomic_field(p, n)
    xs = _iota_x_series(p, n, prec)
    u = (xs - field.pi()) * field.pi().inverse()
    acc = TSeries.zero(field, prec)
    power = TSeries.constant(field.one(), prec)
    for m in range(1, prec):
        power = power * u
        acc = acc + power * Fraction((-1) ** (m + 1), m)
    return acc


def log_iota(F, n):
    """iota_n on B[l_X]: iota_n(l_X) = Lambda + log(1 + zeta(exp(t/p^n)-1)/pi_n)."""
    prof = F.profile
    if n not in prof.levels:
        raise LevelOutOfWindow(f"level {n} outside the window")
    lam = _iota_log_part(prof.p, n, prof.T + 2 * F.t_denominator)
    field = cyclotomic_field(prof.p, n)
    out = [TSeries.zero(field, prof.T) for _ in range(max(len(F.coeffs), 1))]
    for i, c in enumerate(F.coeffs):
        ic = iota(c, n)
        if ic.is_zero():
            continue
        for k in range(i + 1):
            term = ic
            for _ in range(i - k):
                term = term * lam
            out[k] = out[k] + term * comb(i, k)
    return FormalLogSeries(n, out)


def log_operators(op, F, arg=None):
    if isinstance(F, RobbaElement):
        F = LogRobbaElement.lift(F)
    if op == "N":
        return monodromy(F)
    if op == "phi":
        return log_frobenius(F)
    if op == "gamma":
        return log_gamma(F, arg)
    if op == "nabla":
        return log_nabla(F)
    if op == "iota":
        return log_iota(F, arg)
    raise ValueError(f"unknown op {op!r}")
