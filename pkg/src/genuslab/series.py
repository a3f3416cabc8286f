"""Truncated polynomials and half-integer-graded Laurent q-series.

Two generic containers over a `CoefficientRing`:

* `TruncPoly` — sparse multivariate polynomial with per-variable exponent
  caps carried in the data.  A monomial whose exponent exceeds any cap is
  discarded; mixing different (variables, caps, ring) triples is a hard
  `StructuralError`, never a silent min.

* `QSeries` — truncated Laurent series in s, where s^2 = q, so half-integer
  q-exponents are integer s-exponents.  Every series carries `order`, the
  first s-exponent it does NOT know; arithmetic propagates the guarantee
  (product order = min(a.order + lo_b, b.order + lo_a)) and coefficient
  extraction beyond the guarantee raises.

Values are immutable after construction and operations are pure, so they can
be shared freely across threads.  Pipelines should fix one working order per
computation; all constructors take it explicitly.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .errors import NotInvertibleError, StructuralError
from .rings import CoefficientRing, QQ, as_fraction, rational_sqrt


class PolyRing(CoefficientRing):
    """Descriptor for TruncPoly values with fixed variables, caps and base ring."""

    def __init__(self, variables, caps, base=QQ):
        variables = tuple(variables)
        caps = tuple(int(c) for c in caps)
        if len(variables) != len(caps):
            raise StructuralError("one cap per variable required")
        if len(set(variables)) != len(variables):
            raise StructuralError(f"duplicate variables in {variables}")
        if any(c < 0 for c in caps):
            raise StructuralError("caps must be non-negative")
        self.variables = variables
        self.caps = caps
        self.base = base
        self.name = f"{base.name}[{','.join(variables)}]"

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.variables == other.variables
            and self.caps == other.caps
            and self.base == other.base
        )

    def __hash__(self):
        return hash((self.variables, self.caps, self.base))

    def zero(self):
        return TruncPoly(self, {})

    def one(self):
        return TruncPoly(self, {(0,) * len(self.variables): self.base.one()})

    def const(self, c):
        """Constant polynomial with an element of the base ring."""
        return TruncPoly(self, {(0,) * len(self.variables): c})

    def from_fraction(self, a):
        return self.const(self.base.from_fraction(a))

    def gen(self, symbol):
        """The generator `symbol` as a polynomial."""
        if symbol not in self.variables:
            raise StructuralError(f"{symbol!r} is not a variable of {self.name}")
        i = self.variables.index(symbol)
        if self.caps[i] == 0:
            return self.zero()
        exps = tuple(1 if j == i else 0 for j in range(len(self.variables)))
        return TruncPoly(self, {exps: self.base.one()})

    def linear_form(self, coefficients):
        """Sum of coeff*generator for a {symbol: rational} mapping."""
        p = self.zero()
        for sym, c in coefficients.items():
            p = p + self.gen(sym) * as_fraction(c)
        return p

    def is_zero(self, x) -> bool:
        return not x.coeffs

    def invert(self, x):
        return x.inverse()

    def contains(self, x) -> bool:
        return isinstance(x, TruncPoly) and x.ring == self


class TruncPoly:
    """Sparse exponent-vector -> coefficient map under per-variable caps."""

    __slots__ = ("ring", "coeffs")

    def __init__(self, ring: PolyRing, coeffs: dict, *, _clean=False):
        self.ring = ring
        if _clean:
            self.coeffs = coeffs
        else:
            base = ring.base
            caps = ring.caps
            clean = {}
            for exps, c in coeffs.items():
                if len(exps) != len(caps):
                    raise StructuralError("exponent vector has wrong arity")
                if any(e < 0 for e in exps):
                    raise StructuralError("negative exponent in polynomial")
                if any(e > cap for e, cap in zip(exps, caps)):
                    continue
                if not base.is_zero(c):
                    clean[tuple(exps)] = c
            self.coeffs = clean

    # -- helpers -------------------------------------------------------

    def _check(self, other: "TruncPoly"):
        if self.ring != other.ring:
            raise StructuralError(
                f"incompatible polynomial rings {self.ring.name} vs {other.ring.name}"
            )

    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_term(self):
        return self.coeffs.get((0,) * len(self.ring.variables), self.ring.base.zero())

    def coefficient(self, exps) -> object:
        """Coefficient of the monomial with the given exponent vector."""
        exps = tuple(exps)
        if any(e > cap for e, cap in zip(exps, self.ring.caps)):
            raise StructuralError(f"exponents {exps} exceed caps {self.ring.caps}")
        return self.coeffs.get(exps, self.ring.base.zero())

    def coefficient_of(self, **symbol_exps):
        exps = tuple(symbol_exps.get(v, 0) for v in self.ring.variables)
        return self.coefficient(exps)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.coeffs), default=0)

    # -- ring operations ------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.from_fraction(other)
        elif not (isinstance(other, TruncPoly) and other.ring == self.ring):
            if _in_base(self.ring, other):
                other = self.ring.const(other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        self._check(other)
        base = self.ring.base
        out = dict(self.coeffs)
        for exps, c in other.coeffs.items():
            s = out.get(exps)
            s = c if s is None else s + c
            if base.is_zero(s):
                out.pop(exps, None)
            else:
                out[exps] = s
        return TruncPoly(self.ring, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        return TruncPoly(self.ring, {e: -c for e, c in self.coeffs.items()}, _clean=True)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.from_fraction(other)
        elif not (isinstance(other, TruncPoly) and other.ring == self.ring):
            if _in_base(self.ring, other):
                other = self.ring.const(other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncPoly) and other.ring == self.ring:
            caps = self.ring.caps
            base = self.ring.base
            out = {}
            for e1, c1 in self.coeffs.items():
                for e2, c2 in other.coeffs.items():
                    exps = tuple(a + b for a, b in zip(e1, e2))
                    if any(e > cap for e, cap in zip(exps, caps)):
                        continue
                    s = out.get(exps)
                    p = c1 * c2
                    s = p if s is None else s + p
                    if base.is_zero(s):
                        out.pop(exps, None)
                    else:
                        out[exps] = s
            return TruncPoly(self.ring, out, _clean=True)
        if isinstance(other, TruncPoly) and not _in_base(self.ring, other):
            raise StructuralError(
                f"incompatible polynomial rings {self.ring.name} vs {other.ring.name}"
            )
        # scalar: int/Fraction or a bare element of the base ring
        if isinstance(other, (int, Fraction)):
            other = self.ring.base.from_fraction(other)
        base = self.ring.base
        out = {}
        for e, c in self.coeffs.items():
            p = c * other
            if not base.is_zero(p):
                out[e] = p
        return TruncPoly(self.ring, out, _clean=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ring.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.from_fraction(other)
        if not isinstance(other, TruncPoly):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring, frozenset(self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    # -- series operations ------------------------------------------------

    def inverse(self) -> "TruncPoly":
        """Multiplicative inverse; requires an invertible constant term."""
        c0 = self.constant_term()
        try:
            c0_inv = self.ring.base.invert(c0)
        except NotInvertibleError as exc:
            raise NotInvertibleError(
                f"constant term {c0!r} is not a unit; cannot invert series"
            ) from exc
        # p = c0 (1 - u) with u nilpotent under the caps: p^-1 = c0^-1 sum u^j
        u = self.ring.one() - self * c0_inv
        out = self.ring.one()
        term = self.ring.one()
        bound = sum(self.ring.caps)
        for _ in range(bound):
            term = term * u
            if term.is_zero():
                break
            out = out + term
        return out * c0_inv

    def rational_pow(self, e) -> "TruncPoly":
        """Binomial-series power with an exact rational exponent.

        Integer exponents work for any unit leading term.  For fractional
        exponents the constant term must be 1, except over plain rationals
        where an exact square root of the constant is factored out for
        half-integer exponents (non-squares are rejected).
        """
        e = as_fraction(e)
        if e.denominator == 1:
            return self ** int(e)
        c0 = self.constant_term()
        scale = None
        if e.denominator == 2 and isinstance(c0, Fraction) and c0 != 1:
            root = rational_sqrt(c0)
            if root is None:
                raise NotInvertibleError(
                    f"leading coefficient {c0} has no exact square root"
                )
            scale = root ** e.numerator
            c0_inv = self.ring.base.invert(c0)
            return (self * c0_inv).rational_pow(e) * scale
        if not (c0 == self.ring.base.one()):
            raise NotInvertibleError(
                f"fractional power needs constant term 1, got {c0!r}"
            )
        u = self - self.ring.one()
        out = self.ring.one()
        term = self.ring.one()
        binom = Fraction(1)
        bound = sum(self.ring.caps)
        for j in range(1, bound + 1):
            binom *= Fraction(e.numerator - (j - 1) * e.denominator, j * e.denominator)
            term = term * u
            if term.is_zero():
                break
            out = out + term * binom
        return out

    def sqrt_inverse(self) -> "TruncPoly":
        """(self)^(-1/2); the common case of the elliptic integrand."""
        return self.rational_pow(Fraction(-1, 2))

    def exp(self) -> "TruncPoly":
        """exp of a polynomial with zero constant term (nilpotent under caps)."""
        if not self.ring.base.is_zero(self.constant_term()):
            raise StructuralError("exp needs a zero constant term")
        out = self.ring.one()
        term = self.ring.one()
        bound = sum(self.ring.caps)
        for j in range(1, bound + 1):
            term = term * self
            if term.is_zero():
                break
            out = out + term * Fraction(1, factorial(j))
        return out

    # -- univariate operations ---------------------------------------------

    def _univar(self) -> str:
        if len(self.ring.variables) != 1:
            raise StructuralError("operation requires a univariate polynomial")
        return self.ring.variables[0]

    def univar_coeffs(self):
        """Dense coefficient list [c0, c1, ...] of a univariate polynomial."""
        self._univar()
        cap = self.ring.caps[0]
        zero = self.ring.base.zero()
        out = [zero] * (cap + 1)
        for (e,), c in self.coeffs.items():
            out[e] = c
        return out

    def compose(self, value):
        """Substitute `value` (zero constant term) for the variable.

        `value` may live in any polynomial ring whose base ring can absorb
        this polynomial's coefficients via multiplication.
        """
        self._univar()
        if isinstance(value, TruncPoly):
            if not value.ring.base.is_zero(value.constant_term()):
                raise StructuralError("composition point needs zero constant term")
            target = value.ring
        else:
            raise StructuralError("compose expects a TruncPoly argument")
        out = target.zero()
        # Horner from the top coefficient down
        for c in reversed(self.univar_coeffs()):
            out = out * value + _lift(target, c)
        return out

    def integrate(self) -> "TruncPoly":
        """Termwise antiderivative with zero constant; extends the cap by one."""
        var = self._univar()
        ring = PolyRing((var,), (self.ring.caps[0] + 1,), self.ring.base)
        out = {}
        for (e,), c in self.coeffs.items():
            out[(e + 1,)] = c * Fraction(1, e + 1)
        return TruncPoly(ring, out)

    def reversion(self) -> "TruncPoly":
        """Compositional inverse of a series with g(0)=0, g'(0)=1.

        Correcting degree by degree: if g(r) = x + e*x^d + O(x^{d+1}) then
        replacing r by r - e*x^d cancels the degree-d error because g'(0)=1.
        """
        var = self._univar()
        coeffs = self.univar_coeffs()
        base = self.ring.base
        if not base.is_zero(coeffs[0]):
            raise StructuralError("reversion needs g(0) = 0")
        if len(coeffs) < 2 or not (coeffs[1] == base.one()):
            raise StructuralError("reversion needs g'(0) = 1")
        cap = self.ring.caps[0]
        x = self.ring.gen(var)
        r = x
        for d in range(2, cap + 1):
            err = self.compose(r).coefficient((d,))
            if not base.is_zero(err):
                r = r - TruncPoly(self.ring, {(d,): err})
        return r

    def evaluate(self, assignments: dict, target: PolyRing | None = None):
        """Evaluate at ring elements, one per variable.

        Coefficients are pushed into the value domain with multiplication,
        so they must be scalars the value domain understands (Fractions for
        generic-genus polynomials).  Returns a value in the domain of the
        assignment elements.
        """
        missing = [v for v in self.ring.variables if v not in assignments]
        if missing:
            raise StructuralError(f"no value given for variables {missing}")
        result = None
        for exps, c in sorted(self.coeffs.items()):
            term = None
            for v, e in zip(self.ring.variables, exps):
                if e == 0:
                    continue
                f = assignments[v] ** e
                term = f if term is None else term * f
            contrib = c if term is None else term * c
            result = contrib if result is None else result + contrib
        if result is None:
            if target is not None:
                return target.zero()
            raise StructuralError("cannot evaluate the zero polynomial without a target ring")
        return result

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for exps, c in sorted(self.coeffs.items()):
            mono = "*".join(
                f"{v}^{e}" if e > 1 else v
                for v, e in zip(self.ring.variables, exps)
                if e
            )
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)


def _lift(target: PolyRing, coefficient):
    """Lift a coefficient into a polynomial ring as a constant."""
    if isinstance(coefficient, (int, Fraction)):
        return target.from_fraction(coefficient)
    return target.const(coefficient)


def _in_base(ring: PolyRing, value) -> bool:
    """True when `value` is an element of the ring's coefficient domain."""
    contains = getattr(ring.base, "contains", None)
    if contains is not None:
        return contains(value)
    return False


class SeriesRing(CoefficientRing):
    """Descriptor for QSeries coefficients over a base ring.

    `order` is the default construction guarantee (first unknown s-exponent)
    for constants made through the ring protocol; element guarantees evolve
    independently through arithmetic.
    """

    def __init__(self, base=QQ, order=12):
        self.base = base
        self.order = int(order)
        self.name = f"{base.name}[[s;{self.order}]]"

    def __eq__(self, other):
        return (
            isinstance(other, SeriesRing)
            and self.base == other.base
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.base, self.order, "s"))

    def zero(self):
        return QSeries(self, self.order, [], self.order)

    def one(self):
        return self.from_fraction(1)

    def from_fraction(self, a):
        return QSeries(self, 0, [self.base.from_fraction(a)], self.order)

    def const(self, c):
        return QSeries(self, 0, [c], self.order)

    def monomial(self, s_exp: int, c=1):
        """c * s^s_exp, known to the ring's default order past the exponent."""
        return QSeries(self, s_exp, [self.base.from_fraction(c) if isinstance(c, (int, Fraction)) else c], self.order + s_exp)

    def q_monomial(self, q_exp: int, c=1):
        return self.monomial(2 * q_exp, c)

    def from_q_coeffs(self, coeffs, lo_q=0):
        """Embed a q-power-series (integer q-exponents) via s^2 = q."""
        out = self.zero()
        for j, c in enumerate(coeffs):
            if isinstance(c, (int, Fraction)):
                c = self.base.from_fraction(c)
            out = out + QSeries(self, 2 * (lo_q + j), [c], self.order)
        return out

    def is_zero(self, x) -> bool:
        return not x.coeffs

    def invert(self, x):
        return x.inverse()

    def contains(self, x) -> bool:
        return isinstance(x, QSeries) and x.ring.base == self.base


class QSeries:
    """Laurent series in s (s^2 = q) with coefficients in a base ring.

    `lo` is the exponent of the first stored coefficient, `order` the first
    unknown exponent.  The leading stored coefficient is nonzero unless the
    series is (known-)zero, in which case `lo == order` and nothing is stored.
    """

    __slots__ = ("ring", "lo", "coeffs", "order")

    def __init__(self, ring: SeriesRing, lo: int, coeffs, order: int):
        base = ring.base
        coeffs = list(coeffs)
        # strip leading zeros (normalizes lo), then trailing stored zeros
        while coeffs and base.is_zero(coeffs[0]):
            coeffs.pop(0)
            lo += 1
        while coeffs and base.is_zero(coeffs[-1]):
            coeffs.pop()
        if lo + len(coeffs) > order:
            coeffs = coeffs[: max(0, order - lo)]
            while coeffs and base.is_zero(coeffs[-1]):
                coeffs.pop()
        if not coeffs:
            lo = order
        self.ring = ring
        self.lo = lo
        self.coeffs = coeffs
        self.order = order

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        """True when every KNOWN coefficient is zero."""
        return not self.coeffs

    def coefficient(self, s_exp: int):
        """Coefficient of s^s_exp; asking at or beyond `order` raises."""
        if s_exp >= self.order:
            raise StructuralError(
                f"coefficient of s^{s_exp} requested but series is only known below s^{self.order}"
            )
        if s_exp < self.lo or s_exp >= self.lo + len(self.coeffs):
            return self.ring.base.zero()
        return self.coeffs[s_exp - self.lo]

    def q_coefficient(self, q_exp):
        """Coefficient of q^q_exp where q_exp may be a half-integer Fraction."""
        s_exp = as_fraction(q_exp) * 2
        if s_exp.denominator != 1:
            raise StructuralError("q-exponent must be a half integer")
        return self.coefficient(int(s_exp))

    def support(self):
        """Sorted s-exponents with nonzero stored coefficients."""
        base = self.ring.base
        return [self.lo + i for i, c in enumerate(self.coeffs) if not base.is_zero(c)]

    def lowest_exponent(self):
        """s-exponent of the first nonzero coefficient, or None if zero so far."""
        sup = self.support()
        return sup[0] if sup else None

    def _lo_eff(self) -> int:
        return self.lo if self.coeffs else self.order

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, QSeries):
            if other.ring.base != self.ring.base:
                raise StructuralError(
                    f"incompatible series rings {self.ring.name} vs {other.ring.name}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries(self.ring, 0, [self.ring.base.from_fraction(other)], self.ring.order)
        contains = getattr(self.ring.base, "contains", None)
        if contains is not None and contains(other):
            return QSeries(self.ring, 0, [other], self.ring.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        order = min(self.order, o.order)
        if self.is_zero() and o.is_zero():
            return QSeries(self.ring, order, [], order)
        lo = min(self._lo_eff(), o._lo_eff(), order)
        hi = order
        zero = self.ring.base.zero()
        out = [zero] * (hi - lo)
        for src in (self, o):
            for i, c in enumerate(src.coeffs):
                e = src.lo + i
                if lo <= e < hi:
                    out[e - lo] = out[e - lo] + c
        return QSeries(self.ring, lo, out, order)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ring, self.lo, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QSeries):
            o = self._coerce(other)
            order = min(self.order + o._lo_eff(), o.order + self._lo_eff())
            if self.is_zero() or o.is_zero():
                return QSeries(self.ring, order, [], order)
            lo = self.lo + o.lo
            n = order - lo
            if n <= 0:
                return QSeries(self.ring, order, [], order)
            zero = self.ring.base.zero()
            out = [zero] * n
            for i, a in enumerate(self.coeffs):
                if self.ring.base.is_zero(a):
                    continue
                for j, b in enumerate(o.coeffs):
                    k = i + j
                    if k >= n:
                        break
                    out[k] = out[k] + a * b
            return QSeries(self.ring, lo, out, order)
        if isinstance(other, (int, Fraction)):
            other = self.ring.base.from_fraction(other)
        return QSeries(
            self.ring, self.lo, [c * other for c in self.coeffs], self.order
        )

    __rmul__ = __mul__

    def shift(self, s_exp: int) -> "QSeries":
        """Multiply by the exact monomial s^s_exp."""
        return QSeries(self.ring, self.lo + s_exp, list(self.coeffs), self.order + s_exp)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return QSeries(self.ring, 0, [self.ring.base.one()], max(self.order, self.ring.order))
        out = None
        base = self
        while n:
            if n & 1:
                out = base if out is None else out * base
            if n > 1:
                base = base * base
            n >>= 1
        return out

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; the leading coefficient must be a unit."""
        if self.is_zero():
            raise NotInvertibleError("cannot invert a series with no known nonzero term")
        base = self.ring.base
        a0 = self.coeffs[0]
        a0_inv = base.invert(a0)
        n = self.order - self.lo  # known unit-part length
        zero = base.zero()
        a = list(self.coeffs) + [zero] * (n - len(self.coeffs))
        b = [zero] * n
        b[0] = a0_inv
        for m in range(1, n):
            acc = None
            for j in range(1, m + 1):
                if base.is_zero(a[j]):
                    continue
                t = a[j] * b[m - j]
                acc = t if acc is None else acc + t
            if acc is not None:
                b[m] = -(a0_inv * acc)
        return QSeries(self.ring, -self.lo, b, self.order - 2 * self.lo)

    def truncate(self, order: int) -> "QSeries":
        """View with a (weaker or equal) guarantee."""
        if order > self.order:
            raise StructuralError("cannot strengthen a truncation guarantee")
        return QSeries(self.ring, self.lo, list(self.coeffs), order)

    def same_to(self, other, upto: int | None = None) -> bool:
        """Equality of coefficients below min(guarantees) (or below `upto`)."""
        o = self._coerce(other)
        hi = min(self.order, o.order)
        if upto is not None:
            if upto > hi:
                raise StructuralError(
                    f"comparison to s^{upto} requested but series only known below s^{hi}"
                )
            hi = upto
        base = self.ring.base
        lo = min(self._lo_eff(), o._lo_eff())
        for e in range(lo, hi):
            a = self.coeffs[e - self.lo] if self.lo <= e < self.lo + len(self.coeffs) else base.zero()
            b = o.coeffs[e - o.lo] if o.lo <= e < o.lo + len(o.coeffs) else base.zero()
            if not (a == b):
                return False
        return True

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.same_to(o)

    __hash__ = None

    def __repr__(self):
        if self.is_zero():
            return f"O(s^{self.order})"
        parts = []
        base = self.ring.base
        for i, c in enumerate(self.coeffs):
            if base.is_zero(c):
                continue
            e = self.lo + i
            if e == 0:
                parts.append(f"({c})")
            elif e % 2 == 0:
                parts.append(f"({c})*q^{e // 2}" if e != 2 else f"({c})*q")
            else:
                parts.append(f"({c})*q^({e}/2)")
        return " + ".join(parts) + f" + O(s^{self.order})"


def geometric_series(ring: PolyRing, var: str):
    """1/(1 - var) expanded to the cap."""
    return (ring.one() - ring.gen(var)).inverse()
