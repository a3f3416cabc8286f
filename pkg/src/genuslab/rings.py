"""Exact scalars and coefficient-ring descriptors.

All arithmetic in the package is exact.  Scalars are `fractions.Fraction`
(rationals) or `GaussianRational` (Q(i)); composite coefficients (truncated
polynomials, q-series) are defined in `series`.  A `CoefficientRing` object
describes how to construct and invert elements of one coefficient domain; the
elements themselves are plain values combined with the usual operators.

The four rings used throughout are Q, Q(i), the bigraded polynomial ring
Q[delta, epsilon] (a `PolyRing`) and truncated Laurent q-series over Q
(a `SeriesRing`).
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .errors import NotInvertibleError, StructuralError


def as_fraction(value) -> Fraction:
    """Coerce an int or Fraction to Fraction; anything else is an error."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise StructuralError(f"expected an exact rational, got {value!r}")


def parse_fraction(text: str) -> Fraction:
    """Parse the canonical "p/q" (or "p") string form."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise StructuralError(f"not a rational literal: {text!r}") from exc


def format_fraction(a: Fraction) -> str:
    """Canonical string form "p/q" (or "p" when the denominator is 1)."""
    return str(a)


def rational_sqrt(a: Fraction):
    """Exact square root of a rational, or None if `a` is not a square."""
    if a < 0:
        return None
    pn, pd = isqrt(a.numerator), isqrt(a.denominator)
    if pn * pn == a.numerator and pd * pd == a.denominator:
        return Fraction(pn, pd)
    return None


class GaussianRational:
    """Element a + b*i of Q(i) with exact rational parts; i^2 = -1."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_fraction(re))
        object.__setattr__(self, "im", as_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise NotInvertibleError("division by zero in Q(i)")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}*i"


I_UNIT = GaussianRational(0, 1)


class CoefficientRing:
    """Construction/inversion protocol for one coefficient domain."""

    name = "ring"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_fraction(self, a):
        raise NotImplementedError

    def is_zero(self, x) -> bool:
        raise NotImplementedError

    def invert(self, x):
        raise NotImplementedError

    def contains(self, x) -> bool:
        raise NotImplementedError

    def __repr__(self):
        return self.name


class RationalField(CoefficientRing):
    name = "Q"

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_fraction(self, a):
        return as_fraction(a)

    def is_zero(self, x) -> bool:
        return x == 0

    def invert(self, x):
        if x == 0:
            raise NotInvertibleError("division by zero in Q")
        return 1 / as_fraction(x)

    def contains(self, x) -> bool:
        return isinstance(x, (int, Fraction))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")


class GaussianField(CoefficientRing):
    name = "Q(i)"

    def zero(self):
        return GaussianRational(0)

    def one(self):
        return GaussianRational(1)

    def from_fraction(self, a):
        if isinstance(a, GaussianRational):
            return a
        return GaussianRational(as_fraction(a))

    def is_zero(self, x) -> bool:
        return not x

    def invert(self, x):
        return self.from_fraction(x).inverse()

    def contains(self, x) -> bool:
        return isinstance(x, (int, Fraction, GaussianRational))

    def __eq__(self, other):
        return isinstance(other, GaussianField)

    def __hash__(self):
        return hash("Q(i)")


QQ = RationalField()
QI = GaussianField()
