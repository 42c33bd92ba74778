"""Exact arithmetic in real quadratic fields Q(sqrt(d)).

A :class:`Scalar` is ``a + b*sqrt(d)`` with rational ``a``, ``b`` and a
squarefree ``d >= 0``.  ``d == 0`` is the rational field.  Signs and
comparisons are decided exactly (no floating point), which is what every
incidence test in the package relies on.

    >>> phi = Scalar(Fraction(1, 2), Fraction(1, 2), 5)
    >>> phi * phi == phi + 1
    True
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Scalar",
    "FieldMismatch",
    "scalar_normalize",
    "scalar_sign",
    "as_scalar",
    "simplify",
    "parse_scalar",
    "squarefree_part",
    "Vec2",
    "Mat2",
]


class FieldMismatch(ValueError):
    """Raised when elements of two different quadratic fields are combined."""


def squarefree_part(d):
    """Return ``(s, e)`` with ``d == s * s * e`` and ``e`` squarefree."""
    if d < 0:
        raise ValueError("d must be non-negative")
    if d == 0:
        return 0, 0
    s = 1
    e = 1
    n = d
    p = 2
    while p * p <= n:
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        s *= p ** (k // 2)
        if k % 2:
            e *= p
        p += 1
    e *= n
    return s, e


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not a rational number: {x!r}")


class Scalar:
    """Element ``a + b*sqrt(d)`` of a real quadratic field (or of Q)."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d=0):
        a = _frac(a)
        b = _frac(b)
        d = int(d)
        if d < 0:
            raise ValueError("only real quadratic fields are supported (d >= 0)")
        s, e = squarefree_part(d)
        if e <= 1:
            # sqrt(d) is rational: fold it into the rational part
            a = a + b * s
            b = Fraction(0)
            e = 0
        else:
            b = b * s
        self.a = a
        self.b = b
        self.d = e

    @classmethod
    def _raw(cls, a, b, d):
        obj = object.__new__(cls)
        obj.a = a
        obj.b = b
        obj.d = d
        return obj

    # -- field bookkeeping ---------------------------------------------------

    def _field(self, other):
        d1 = self.d if self.b else 0
        d2 = other.d if other.b else 0
        if d1 and d2 and d1 != d2:
            raise FieldMismatch(f"cannot combine Q(sqrt({d1})) with Q(sqrt({d2}))")
        return d1 or d2 or self.d or other.d

    def is_rational(self):
        return self.b == 0

    def to_fraction(self):
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = _frac(other)
            except TypeError:
                return NotImplemented
            return Scalar._raw(self.a + other, self.b, self.d)
        d = self._field(other)
        return Scalar._raw(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return Scalar._raw(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = _frac(other)
            except TypeError:
                return NotImplemented
            return Scalar._raw(self.a - other, self.b, self.d)
        d = self._field(other)
        return Scalar._raw(self.a - other.a, self.b - other.b, d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = _frac(other)
            except TypeError:
                return NotImplemented
            return Scalar._raw(self.a * other, self.b * other, self.d)
        d = self._field(other)
        if not self.b:
            return Scalar._raw(self.a * other.a, self.a * other.b, d)
        if not other.b:
            return Scalar._raw(self.a * other.a, self.b * other.a, d)
        return Scalar._raw(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def conjugate(self):
        """Galois conjugate ``a - b*sqrt(d)``."""
        return Scalar._raw(self.a, -self.b, self.d)

    def norm(self):
        """Field norm ``a^2 - d b^2`` (a rational number)."""
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        if not self.b:
            if not self.a:
                raise ZeroDivisionError("Scalar division by zero")
            return Scalar._raw(1 / self.a, Fraction(0), self.d)
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("Scalar division by zero")
        return Scalar._raw(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            try:
                other = _frac(other)
            except TypeError:
                return NotImplemented
            if other == 0:
                raise ZeroDivisionError("Scalar division by zero")
            return Scalar._raw(self.a / other, self.b / other, self.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = Scalar._raw(Fraction(1), Fraction(0), self.d)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- order ------------------------------------------------------------------

    def sign(self):
        return scalar_sign(self)

    def _cmp(self, other):
        if isinstance(other, Scalar):
            return (self - other).sign()
        try:
            other = _frac(other)
        except TypeError:
            return None
        return Scalar._raw(self.a - other, self.b, self.d).sign()

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if self.a != other.a or self.b != other.b:
                return False
            return not self.b or self.d == other.d
        if isinstance(other, (int, Fraction)) or isinstance(other, Rational):
            return not self.b and self.a == other
        return NotImplemented

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c < 0

    def __le__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        if c is None:
            return NotImplemented
        return c >= 0

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def floor(self):
        """Exact integer floor."""
        if not self.b:
            return math.floor(self.a)
        guess = math.floor(float(self))
        # the float guess can be off by one near integers; repair exactly
        while self < guess:
            guess -= 1
        while self >= guess + 1:
            guess += 1
        return guess

    __floor__ = floor

    def frac_part(self):
        """``self - floor(self)``, in ``[0, 1)``."""
        return self - self.floor()

    def sqrt(self):
        """Exact square root inside the same field, or ``None``."""
        s = self.sign()
        if s < 0:
            return None
        if s == 0:
            return Scalar._raw(Fraction(0), Fraction(0), self.d)
        if not self.b:
            r = _rational_sqrt(self.a)
            if r is not None:
                return Scalar._raw(r, Fraction(0), self.d)
            if self.d:
                r = _rational_sqrt(self.a / self.d)
                if r is not None:
                    return Scalar._raw(Fraction(0), r, self.d)
            return None
        # (x + y sqrt d)^2 = a + b sqrt d  <=>  x^2 + d y^2 = a, 2 x y = b
        disc = _rational_sqrt(self.a * self.a - self.d * self.b * self.b)
        if disc is None:
            return None
        for x2 in ((self.a + disc) / 2, (self.a - disc) / 2):
            x = _rational_sqrt(x2)
            if x is None or x == 0:
                continue
            cand = Scalar._raw(x, self.b / (2 * x), self.d)
            if cand * cand == self:
                return abs(cand)
        return None

    # -- text -------------------------------------------------------------------

    def __str__(self):
        if not self.b:
            return str(self.a)
        head = "" if self.a == 0 else str(self.a)
        if self.b < 0:
            tail = f"-{-self.b}*sqrt({self.d})"
        else:
            tail = f"{'+' if head else ''}{self.b}*sqrt({self.d})"
        return head + tail

    def __repr__(self):
        return f"Scalar({self})"


def _rational_sqrt(q):
    q = _frac(q)
    if q < 0:
        return None
    n, m = q.numerator, q.denominator
    rn, rm = math.isqrt(n), math.isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def simplify(x):
    """Drop to a plain Fraction when ``x`` is rational (fast path for origamis)."""
    if isinstance(x, Scalar):
        return x.a if not x.b else x
    return _frac(x)


def scalar_normalize(a, b, d):
    """Canonical :class:`Scalar` for ``a + b*sqrt(d)``."""
    return Scalar(a, b, d)


def scalar_sign(s):
    """Exact sign of ``a + b*sqrt(d)`` in ``{-1, 0, 1}``."""
    a, b = s.a, s.b
    if not b or not s.d:
        if not s.d:
            a = a + 0 * b
        return (a > 0) - (a < 0)
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    # opposite signs: compare a^2 with b^2 d
    lhs = a * a
    rhs = b * b * s.d
    if lhs > rhs:
        return sa
    if lhs < rhs:
        return sb
    return 0


def as_scalar(x, d=0):
    """Coerce ints, Fractions, strings and Scalars to :class:`Scalar`."""
    if isinstance(x, Scalar):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    return Scalar._raw(_frac(x), Fraction(0), d)


_SCALAR_RE = re.compile(
    r"^\s*(?P<a>[+-]?\d+(?:/\d+)?)?\s*"
    r"(?:(?P<sgn>[+-])?\s*(?P<b>\d+(?:/\d+)?)?\s*\*?\s*sqrt\(\s*(?P<d>\d+)\s*\))?\s*$"
)


def parse_scalar(text):
    """Parse the textual form ``a+b*sqrt(d)`` (rationals written ``p/q``)."""
    m = _SCALAR_RE.match(text)
    if not m or (m.group("a") is None and m.group("d") is None):
        raise ValueError(f"cannot parse scalar: {text!r}")
    a = Fraction(m.group("a")) if m.group("a") else Fraction(0)
    if m.group("d") is None:
        return Scalar._raw(a, Fraction(0), 0)
    b = Fraction(m.group("b")) if m.group("b") else Fraction(1)
    if m.group("sgn") == "-":
        b = -b
    elif m.group("sgn") is None and m.group("a") is not None:
        # "c*sqrt(d)": the leading number is the coefficient of the root
        if m.group("b") is not None:
            raise ValueError(f"cannot parse scalar: {text!r}")
        a, b = Fraction(0), a
    return Scalar(a, b, int(m.group("d")))


class Vec2:
    """Plane vector with exact coordinates."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        self.x = as_scalar(x)
        self.y = as_scalar(y)

    def __add__(self, o):
        return Vec2(self.x + o.x, self.y + o.y)

    def __sub__(self, o):
        return Vec2(self.x - o.x, self.y - o.y)

    def __neg__(self):
        return Vec2(-self.x, -self.y)

    def __mul__(self, k):
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __iter__(self):
        yield self.x
        yield self.y

    def __eq__(self, o):
        return isinstance(o, Vec2) and self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def norm2(self):
        return self.x * self.x + self.y * self.y

    def cross(self, o):
        return self.x * o.y - self.y * o.x

    def dot(self, o):
        return self.x * o.x + self.y * o.y

    def __repr__(self):
        return f"Vec2({self.x}, {self.y})"


class Mat2:
    """2x2 matrix ``((a, b), (c, d))`` with exact entries."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a = as_scalar(a)
        self.b = as_scalar(b)
        self.c = as_scalar(c)
        self.d = as_scalar(d)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    def det(self):
        return self.a * self.d - self.b * self.c

    def __matmul__(self, o):
        if isinstance(o, Mat2):
            return Mat2(
                self.a * o.a + self.b * o.c,
                self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c,
                self.c * o.b + self.d * o.d,
            )
        if isinstance(o, Vec2):
            return Vec2(self.a * o.x + self.b * o.y, self.c * o.x + self.d * o.y)
        x, y = o
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def inverse(self):
        det = self.det()
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def is_integral(self):
        return all(e.is_rational() and e.a.denominator == 1 for e in self.entries())

    def __eq__(self, o):
        return isinstance(o, Mat2) and self.entries() == o.entries()

    def __hash__(self):
        return hash(self.entries())

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}; {self.c}, {self.d})"
