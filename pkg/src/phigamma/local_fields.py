"""Exact arithmetic in Q_p, in K_n = Q_p(zeta_{p^n}) and in K_n((t)).

Cyclotomic elements are stored on the power basis of the uniformizer
pi_n = zeta_{p^n} - 1 with rational coefficients; the reduction polynomial
is ((1+Y)^{p^n} - 1)/((1+Y)^{p^{n-1}} - 1).  Rational coefficients are
exact, so the only truncation in this module is the t-adic one carried by
:class:`TSeries`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import inf

from . import _poly
from .errors import (
    DivisionByZero,
    IndeterminateZero,
    LevelMismatch,
    NotInvertible,
    PrecisionExhausted,
)


def vp_int(a: int, p: int) -> int:
    if a == 0:
        return inf
    a = abs(a)
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v


def vp(x, p: int):
    """p-adic valuation of an int or Fraction; +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return inf
    return vp_int(x.numerator, p) - vp_int(x.denominator, p)


@dataclass(frozen=True)
class AtLeast:
    """Marker for a valuation only known to be at least ``bound``."""

    bound: int

    def __str__(self):
        return f">= {self.bound}"

    def __ge__(self, other):
        return self.bound >= other

    def __gt__(self, other):
        return self.bound > other


# ---------------------------------------------------------------- Q_p

class PAdicScalar:
    """x = p^val * unit known modulo p^prec (absolute precision)."""

    __slots__ = ("p", "val", "unit", "prec")

    def __init__(self, p, val, unit, prec):
        self.p = p
        self.prec = prec
        if val == inf or val >= prec:
            self.val, self.unit = inf, None
            return
        rel = prec - val
        unit %= p ** rel
        if unit % p == 0:
            raise ValueError("unit part must be prime to p")
        self.val, self.unit = val, unit

    @classmethod
    def from_rational(cls, x, p, prec):
        x = Fraction(x)
        if x == 0:
            return cls(p, inf, None, prec)
        v = vp(x, p)
        u = x / Fraction(p) ** v
        if v >= prec:
            return cls(p, inf, None, prec)
        m = p ** (prec - v)
        return cls(p, v, u.numerator * pow(u.denominator, -1, m) % m, prec)

    @property
    def relative_precision(self):
        return 0 if self.val == inf else self.prec - self.val

    def is_zero(self):
        return self.val == inf

    def to_rational(self):
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.unit) * Fraction(self.p) ** self.val

    def _check(self, other):
        if not isinstance(other, PAdicScalar):
            other = PAdicScalar.from_rational(other, self.p, self.prec)
        if other.p != self.p:
            raise ValueError("different primes")
        return other

    def __add__(self, other):
        other = self._check(other)
        prec = min(self.prec, other.prec)
        return PAdicScalar.from_rational(self.to_rational() + other.to_rational(), self.p, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        return PAdicScalar(self.p, self.val, -self.unit, self.prec)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __mul__(self, other):
        other = self._check(other)
        if self.is_zero() or other.is_zero():
            vx = self.prec if self.is_zero() else self.val
            vy = other.prec if other.is_zero() else other.val
            return PAdicScalar(self.p, inf, None, vx + vy)
        prec = min(self.prec + other.val, other.prec + self.val)
        if prec - (self.val + other.val) <= 0:
            raise PrecisionExhausted("product has no significant digits")
        return PAdicScalar.from_rational(self.to_rational() * other.to_rational(), self.p, prec)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of p-adic zero")
        rel = self.relative_precision
        if rel <= 0:
            raise PrecisionExhausted("no significant digits to invert")
        return PAdicScalar.from_rational(1 / self.to_rational(), self.p, -self.val + rel)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, PAdicScalar):
            try:
                other = self._check(other)
            except (TypeError, ValueError):
                return NotImplemented
        prec = min(self.prec, other.prec)
        return (self.to_rational() - other.to_rational() == 0) or vp(
            self.to_rational() - other.to_rational(), self.p) >= prec

    def __hash__(self):
        return hash((self.p, self.val, self.unit))

    def __repr__(self):
        if self.is_zero():
            return f"O({self.p}^{self.prec})"
        return f"{self.p}^{self.val}*{self.unit} + O({self.p}^{self.prec})"


def padic_arith(op, x, y=None):
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "neg":
        return -x
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------- K_n

class CyclotomicField:
    """K_n = Q(zeta_{p^n}) on the basis 1, pi, ..., pi^{e-1}."""

    def __init__(self, p, n):
        if n < 1:
            raise ValueError("level must be >= 1")
        self.p, self.n = p, n
        self.e = p ** (n - 1) * (p - 1)
        self.minpoly = _poly.q_level(p, n)
        # reductions of pi^k for e <= k <= 2e - 2
        self._high = []
        for k in range(self.e, 2 * self.e - 1):
            mono = [Fraction(0)] * k + [Fraction(1)]
            r = _poly.mod(mono, self.minpoly)
            self._high.append(r + [Fraction(0)] * (self.e - len(r)))
        self._zeta_powers = None

    def __repr__(self):
        return f"K_{self.n}(p={self.p})"

    def __call__(self, coeffs):
        return CyclotomicElement(self, coeffs)

    def zero(self):
        return CyclotomicElement(self, ())

    def one(self):
        return CyclotomicElement(self, (1,))

    def pi(self):
        if self.e == 1:
            return CyclotomicElement(self, _poly.mod([0, 1], self.minpoly))
        return CyclotomicElement(self, (0, 1))

    def from_poly(self, a):
        return CyclotomicElement(self, _poly.mod(a, self.minpoly))

    def zeta_power(self, k):
        """zeta^k = (1 + pi)^k with k read modulo p^n."""
        if self._zeta_powers is None:
            zeta = self.one() + self.pi()
            pw = [self.one()]
            for _ in range(self.p ** self.n - 1):
                pw.append(pw[-1] * zeta)
            self._zeta_powers = pw
        return self._zeta_powers[k % (self.p ** self.n)]


@lru_cache(maxsize=None)
def cyclotomic_field(p, n):
    return CyclotomicField(p, n)


class CyclotomicElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        self.field = field
        c = [Fraction(x) for x in coeffs]
        if len(c) > field.e:
            c = _poly.mod(_poly.trim(c), field.minpoly)
        self.coeffs = tuple(c) + (Fraction(0),) * (field.e - len(c))

    @property
    def level(self):
        return self.field.n

    def _coerce(self, other):
        if isinstance(other, CyclotomicElement):
            if other.field is not self.field:
                raise LevelMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.field, (other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicElement(self.field, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CyclotomicElement(self.field, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.field, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        e = self.field.e
        prod = [Fraction(0)] * (2 * e - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        out = prod[:e]
        for k in range(e, 2 * e - 1):
            c = prod[k]
            if c:
                red = self.field._high[k - e]
                for i in range(e):
                    out[i] += c * red[i]
        return CyclotomicElement(self.field, out)

    __rmul__ = __mul__

    def multiplication_matrix(self):
        """Columns are the coordinates of self * pi^j."""
        cols = []
        x = self
        pi = self.field.pi()
        for _ in range(self.field.e):
            cols.append(list(x.coeffs))
            x = x * pi
        return [list(r) for r in zip(*cols)]

    def inverse(self):
        if not self:
            raise DivisionByZero("inverse of zero in K_n")
        from .linalg import solve
        rhs = [Fraction(1)] + [Fraction(0)] * (self.field.e - 1)
        return CyclotomicElement(self.field, solve(self.multiplication_matrix(), rhs))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZero("division by zero")
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.n, self.coeffs))

    def is_rational(self):
        return not any(self.coeffs[1:])

    def valuation(self):
        return cyclo_valuation(self)

    def embed(self, n_target):
        """Image under K_n -> K_m (m >= n) sending pi_n to (1+pi_m)^{p^{m-n}} - 1."""
        if n_target < self.level:
            raise LevelMismatch("can only embed upwards")
        x = self
        while x.level < n_target:
            big = cyclotomic_field(x.field.p, x.level + 1)
            image = big.zeta_power(x.field.p) - 1
            acc = big.zero()
            for c in reversed(x.coeffs):
                acc = acc * image + c
            x = acc
        return x

    def __repr__(self):
        terms = [f"{c}*pi^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return "(" + (" + ".join(terms) or "0") + ")"


def cyclo_arith(op, x, y=None):
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    raise ValueError(f"unknown op {op!r}")


def cyclo_valuation(x):
    """min_i v_p(c_i) + i/e, normalised so that v(p) = 1."""
    if not x:
        raise IndeterminateZero("valuation of zero")
    p, e = x.field.p, x.field.e
    return min(vp(c, p) + Fraction(i, e) for i, c in enumerate(x.coeffs) if c)


# ---------------------------------------------------------------- K_n((t))

class TSeries:
    """sum_{k >= start} c_k t^k in K_n((t)), known modulo t^prec."""

    __slots__ = ("field", "start", "coeffs", "prec")

    def __init__(self, field, start, coeffs, prec):
        self.field = field
        coeffs = list(coeffs)[: max(prec - start, 0)]
        # drop leading zeros so that start is the true valuation when known
        i = 0
        while i < len(coeffs) and not coeffs[i]:
            i += 1
        self.start = start + i if i < len(coeffs) else prec
        self.coeffs = coeffs[i:] if i < len(coeffs) else []
        self.prec = prec

    @classmethod
    def constant(cls, c, prec):
        return cls(c.field, 0, [c], prec)

    @classmethod
    def zero(cls, field, prec):
        return cls(field, prec, [], prec)

    @property
    def level(self):
        return self.field.n

    @property
    def pole_order(self):
        return max(0, -self.start) if self.coeffs else 0

    def coefficient(self, k):
        if k >= self.prec:
            raise PrecisionExhausted(f"t^{k} beyond known precision t^{self.prec}")
        i = k - self.start
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return self.field.zero()

    def valuation(self):
        """t-adic valuation, or AtLeast(prec) if zero to known precision."""
        if not self.coeffs:
            return AtLeast(self.prec)
        return self.start

    def _v(self):
        return self.start if self.coeffs else self.prec

    def __add__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicElement)):
            if isinstance(other, CyclotomicElement):
                other = TSeries.constant(other, max(self.prec, 1))
            else:
                other = TSeries.constant(self.field.one() * other, max(self.prec, 1))
        if other.field is not self.field:
            raise LevelMismatch("t-series of different levels")
        prec = min(self.prec, other.prec)
        lo = min(self._v(), other._v(), prec)
        out = [self.field.zero()] * max(prec - lo, 0)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.start + i - lo
                if 0 <= k < len(out):
                    out[k] = out[k] + c
        return TSeries(self.field, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return TSeries(self.field, self.start, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicElement)):
            return TSeries(self.field, self.start, [c * other for c in self.coeffs], self.prec)
        if other.field is not self.field:
            raise LevelMismatch("t-series of different levels")
        va, vb = self._v(), other._v()
        prec = min(self.prec + vb, other.prec + va)
        lo = va + vb
        n = max(prec - lo, 0)
        out = [self.field.zero()] * n
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            if not a:
                continue
            for j in range(min(len(other.coeffs), n - i)):
                b = other.coeffs[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return TSeries(self.field, lo, out, prec)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by t^k."""
        return TSeries(self.field, self.start + k, self.coeffs, self.prec + k)

    def truncate(self, prec):
        return TSeries(self.field, self.start, self.coeffs, min(prec, self.prec))

    def inverse(self):
        return tseries_invert(self)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, CyclotomicElement)):
            return self * (1 / other if not isinstance(other, CyclotomicElement) else other.inverse())
        return self * other.inverse()

    def embed(self, n_target):
        field = cyclotomic_field(self.field.p, n_target)
        return TSeries(field, self.start, [c.embed(n_target) for c in self.coeffs], self.prec)

    def is_zero(self):
        return not self.coeffs

    def __repr__(self):
        terms = [f"{c}*t^{self.start + i}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms or ["0"]) + f" + O(t^{self.prec})"


def tseries_invert(f):
    if not f.coeffs:
        raise NotInvertible("series is zero to known precision")
    v = f.start
    lead = f.coeffs[0]
    inv_lead = lead.inverse()
    n = f.prec - v  # unit part known mod t^n
    u = [c * inv_lead for c in f.coeffs[:n]]
    g = [f.field.one()]
    for k in range(1, n):
        acc = f.field.zero()
        for j in range(1, min(k, len(u) - 1) + 1):
            if u[j]:
                acc = acc + u[j] * g[k - j]
        g.append(-acc)
    g = [c * inv_lead for c in g]
    return TSeries(f.field, -v, g, n - v)


def tseries_t_valuation(f):
    return f.valuation()


def newton_polygon(points):
    """Lower convex hull of (abscissa, valuation) points; infinite valuations skipped.

    Returns the list of segments ``(x0, y0, x1, y1)`` from left to right.
    """
    pts = sorted((x, Fraction(y)) for x, y in points if y != inf)
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    return [(a[0], a[1], b[0], b[1]) for a, b in zip(hull, hull[1:])]


def root_valuations(points):
    """Multiset {valuation: multiplicity} of the roots read off the Newton polygon."""
    out = {}
    for x0, y0, x1, y1 in newton_polygon(points):
        v = -(y1 - y0) / (x1 - x0)
        out[v] = out.get(v, 0) + (x1 - x0)
    return out
