"""Exact and error-tracked arithmetic kernels.

Integer matching counts, binomial coefficients, dense integer polynomials
with the coefficient operations the root certificates need, and a
high-precision real number whose every operation carries a directed
absolute error bound, so that a strict inequality is only reported when it
holds for every value inside the tracked intervals.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath.libmp import mpf_abs, mpf_add, mpf_lt, mpf_neg, mpf_sub

BigRational = Fraction

PRECISION_ENV = "PORIENT_PRECISION"
_DEFAULT_BITS = 128
_precision_bits = max(int(os.getenv(PRECISION_ENV, str(_DEFAULT_BITS))), 24)


def set_precision(bits: int) -> None:
    """Set the working precision (in bits) for new high-precision values."""
    global _precision_bits
    bits = int(bits)
    if bits < 24:
        raise ValueError("precision below 24 bits is not supported")
    _precision_bits = bits


def get_precision() -> int:
    return _precision_bits


def pairings_count(a: int) -> int:
    """Number of ways to partition 2*a labelled points into unordered pairs.

    Equals (2a)! / (a! * 2**a); the a = 0 value is 1 (the empty pairing).
    """
    if a < 0:
        raise ValueError("a must be nonnegative")
    return math.factorial(2 * a) // (math.factorial(a) * 2**a)


def binomial(n: int, k: int) -> int:
    """Binomial coefficient, 0 whenever k is outside 0..n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return math.comb(n, k)


@dataclass(frozen=True)
class IntPolynomial:
    """Dense integer polynomial; ``coeffs[i]`` is the coefficient of x**i.

    Trailing zero coefficients are trimmed on construction, so the zero
    polynomial has an empty coefficient tuple and degree -1.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        c = tuple(int(v) for v in self.coeffs)
        while c and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        """Evaluate by Horner's rule; exact for int or Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return IntPolynomial(tuple(out))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial(tuple(c * other for c in self.coeffs))
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    __rmul__ = __mul__

    def divexact(self, c: int) -> "IntPolynomial":
        """Divide every coefficient by c, requiring exact divisibility."""
        if c == 0:
            raise ValueError("division by zero")
        for v in self.coeffs:
            if v % c:
                raise ValueError(f"coefficient {v} not divisible by {c}")
        return IntPolynomial(tuple(v // c for v in self.coeffs))

    def shift_up(self, k: int) -> "IntPolynomial":
        """Multiply by x**k."""
        if k < 0:
            raise ValueError("k must be nonnegative")
        if self.is_zero():
            return self
        return IntPolynomial((0,) * k + self.coeffs)

    def of_square(self) -> "IntPolynomial":
        """Substitute x -> x**2."""
        if self.is_zero():
            return self
        out = [0] * (2 * len(self.coeffs) - 1)
        for i, c in enumerate(self.coeffs):
            out[2 * i] = c
        return IntPolynomial(tuple(out))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def reciprocal(self, degree: int | None = None) -> "IntPolynomial":
        """Reverse the coefficients with respect to the given degree."""
        deg = self.degree if degree is None else degree
        if deg < self.degree:
            raise ValueError("degree must be at least the actual degree")
        padded = self.coeffs + (0,) * (deg - self.degree)
        return IntPolynomial(tuple(reversed(padded)))

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient (-1 for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1


def taylor_shift_one(poly: IntPolynomial) -> IntPolynomial:
    """Return the polynomial P(1 + x), computed by exact synthetic division."""
    c = list(poly.coeffs)
    n = len(c)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            c[j] += c[j + 1]
    return IntPolynomial(tuple(c))


def sign_changes(poly: IntPolynomial) -> int:
    """Count sign alternations in the sequence of nonzero coefficients."""
    signs = [1 if c > 0 else -1 for c in poly.coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def verify_root_bracket(poly: IntPolynomial, lo, hi) -> bool:
    """Check, in exact rational arithmetic, that poly changes sign on [lo, hi]."""
    lo = Fraction(lo)
    hi = Fraction(hi)
    if lo >= hi:
        raise ValueError("bracket requires lo < hi")
    a = poly(lo)
    b = poly(hi)
    return (a < 0 < b) or (b < 0 < a)


def refine_root_bisection(
    poly: IntPolynomial, lo, hi, width=Fraction(1, 10**12)
) -> Fraction:
    """Shrink a verified sign-change bracket below ``width``; returns the midpoint.

    Exact rational bisection; intended for reporting root locations, not for
    certifying anything beyond what verify_root_bracket already established.
    """
    lo = Fraction(lo)
    hi = Fraction(hi)
    if not verify_root_bracket(poly, lo, hi):
        raise ValueError("not a sign-change bracket")
    sign_lo = 1 if poly(lo) > 0 else -1
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = poly(mid)
        if v == 0:
            return mid
        if (1 if v > 0 else -1) == sign_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _ulp(x: mpmath.mpf, prec: int) -> mpmath.mpf:
    """Upper bound on the rounding error of a value computed at prec bits."""
    if x == 0:
        return mpmath.mpf(0)
    return mpmath.ldexp(1, mpmath.mag(x) - prec + 3)


class HighPrecisionReal:
    """A real number with a tracked absolute error bound.

    ``value`` is an mpmath float, ``err`` a nonnegative bound on the distance
    to the represented exact quantity. The comparison ``a < b`` returns True
    only when a.value + a.err < b.value - b.err, so a True answer certifies
    the strict inequality; False means "not provably less", nothing more.
    """

    __slots__ = ("value", "err")

    def __init__(self, value, err=0):
        self.value = mpmath.mpf(value) if not isinstance(value, mpmath.mpf) else value
        self.err = mpmath.mpf(err) if not isinstance(err, mpmath.mpf) else err
        if self.err < 0:
            raise ValueError("error bound must be nonnegative")

    @classmethod
    def exact(cls, x) -> "HighPrecisionReal":
        """Build from an int or Fraction, with zero error when representable."""
        if isinstance(x, HighPrecisionReal):
            return x
        if isinstance(x, float):
            return cls(mpmath.mpf(x), 0)
        q = Fraction(x)
        prec = get_precision()
        with mpmath.workprec(prec + 20):
            num = mpmath.mpf(q.numerator)
            den = mpmath.mpf(q.denominator)
            v = num / den
            den_pow2 = q.denominator & (q.denominator - 1) == 0
            if den_pow2 and abs(q.numerator).bit_length() <= prec:
                return cls(v, 0)
            return cls(v, _ulp(v, prec))

    @classmethod
    def zero(cls) -> "HighPrecisionReal":
        return cls(mpmath.mpf(0), 0)

    @staticmethod
    def _coerce(x) -> "HighPrecisionReal":
        if isinstance(x, HighPrecisionReal):
            return x
        if isinstance(x, (int, Fraction, float)):
            return HighPrecisionReal.exact(x)
        raise TypeError(f"cannot mix HighPrecisionReal with {type(x).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        prec = get_precision()
        with mpmath.workprec(prec + 20):
            v = self.value + other.value
            e = self.err + other.err + _ulp(v, prec)
        return HighPrecisionReal(v, e)

    __radd__ = __add__

    def __neg__(self):
        # negate through libmp so no rounding to the ambient precision occurs
        return HighPrecisionReal(mpmath.make_mpf(mpf_neg(self.value._mpf_)), self.err)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        prec = get_precision()
        with mpmath.workprec(prec + 20):
            v = self.value * other.value
            e = (
                abs(self.value) * other.err
                + abs(other.value) * self.err
                + self.err * other.err
                + _ulp(v, prec)
            )
        return HighPrecisionReal(v, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        prec = get_precision()
        with mpmath.workprec(prec + 20):
            lower = abs(other.value) - other.err
            if lower <= 0:
                raise ValueError("division by an interval containing zero")
            v = self.value / other.value
            e = (abs(self.value) * other.err + abs(other.value) * self.err) / (
                abs(other.value) * lower
            ) + _ulp(v, prec)
        return HighPrecisionReal(v, e)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __abs__(self):
        return HighPrecisionReal(mpmath.make_mpf(mpf_abs(self.value._mpf_)), self.err)

    def definitely_less_than(self, other) -> bool:
        other = self._coerce(other)
        p = get_precision() + 60
        # round the upper endpoint toward +inf and the lower toward -inf, so a
        # True verdict survives the rounding of the endpoint arithmetic itself
        hi = mpf_add(self.value._mpf_, self.err._mpf_, p, "c")
        lo = mpf_sub(other.value._mpf_, other.err._mpf_, p, "f")
        return bool(mpf_lt(hi, lo))

    def definitely_greater_than(self, other) -> bool:
        return self._coerce(other).definitely_less_than(self)

    __lt__ = definitely_less_than
    __gt__ = definitely_greater_than

    def overlaps(self, other) -> bool:
        """True when the two tracked intervals intersect."""
        other = self._coerce(other)
        return not (self < other or other < self)

    def midpoint_float(self) -> float:
        return float(self.value)

    def error_float(self) -> float:
        return float(self.err)

    def to_decimal(self, digits: int = 20) -> str:
        return mpmath.nstr(self.value, digits)

    def __repr__(self) -> str:
        return f"HighPrecisionReal({mpmath.nstr(self.value, 25)}, err<={mpmath.nstr(self.err, 3)})"


def hp_log(x) -> HighPrecisionReal:
    """Natural log with tracked error; exact zero for the argument 1."""
    prec = get_precision()
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        if q <= 0:
            raise ValueError("log of a nonpositive rational")
        if q == 1:
            return HighPrecisionReal.zero()
        with mpmath.workprec(prec + 20):
            v = mpmath.log(mpmath.mpf(q.numerator)) - mpmath.log(mpmath.mpf(q.denominator))
            e = mpmath.ldexp(3, -prec) + _ulp(v, prec)
        return HighPrecisionReal(v, e)
    x = HighPrecisionReal._coerce(x)
    with mpmath.workprec(prec + 20):
        lower = x.value - x.err
        if lower <= 0:
            raise ValueError("log of an interval touching zero")
        v = mpmath.log(x.value)
        e = x.err / lower + _ulp(v, prec)
    return HighPrecisionReal(v, e)


def hp_sqrt(x) -> HighPrecisionReal:
    """Square root with tracked error; exact for perfect-square rationals."""
    prec = get_precision()
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        if q < 0:
            raise ValueError("sqrt of a negative rational")
        if q == 0:
            return HighPrecisionReal.zero()
        rn = math.isqrt(q.numerator)
        rd = math.isqrt(q.denominator)
        if rn * rn == q.numerator and rd * rd == q.denominator:
            return HighPrecisionReal.exact(Fraction(rn, rd))
        with mpmath.workprec(prec + 20):
            v = mpmath.sqrt(mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator))
            e = mpmath.ldexp(3, -prec) * v + _ulp(v, prec)
        return HighPrecisionReal(v, e)
    x = HighPrecisionReal._coerce(x)
    with mpmath.workprec(prec + 20):
        lower = x.value - x.err
        if lower < 0:
            raise ValueError("sqrt of an interval extending below zero")
        v = mpmath.sqrt(x.value)
        if lower > 0:
            e = x.err / (2 * mpmath.sqrt(lower)) + _ulp(v, prec)
        else:
            e = mpmath.sqrt(x.err) + _ulp(v, prec)
    return HighPrecisionReal(v, e)


def hp_exp(x) -> HighPrecisionReal:
    x = HighPrecisionReal._coerce(x)
    prec = get_precision()
    with mpmath.workprec(prec + 20):
        v = mpmath.exp(x.value)
        hi = mpmath.exp(x.value + x.err)
        e = (hi - v) + _ulp(hi, prec)
    return HighPrecisionReal(v, e)


def xlogx(q) -> HighPrecisionReal:
    """x * log(x) for a rational x >= 0, with the boundary value 0 at x = 0."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("xlogx requires a nonnegative argument")
    if q == 0:
        return HighPrecisionReal.zero()
    return HighPrecisionReal.exact(q) * hp_log(q)
