"""Exact rationals and closed rational intervals.

Every transcendental quantity used by the bound pipeline (powers of pi,
square roots of integers) is carried as a :class:`RationalInterval` whose
endpoints are :class:`fractions.Fraction` values.  Nothing here touches
floating point.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Union

Rational = Fraction
Number = Union[int, Fraction]

DEFAULT_PRECISION_BITS = 128
MAX_PRECISION_BITS = 512
FACTORIAL_GUARD = 10**4


class PrecisionExhausted(ArithmeticError):
    """An interval comparison stayed undecided up to the precision cap."""


class IntervalDivisionError(ZeroDivisionError):
    pass


class Comparison(enum.Enum):
    PROVEN_GREATER = "ProvenGreater"
    PROVEN_LESS = "ProvenLess"
    UNDECIDED = "Undecided"


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    if x == 0:
        return x
    shift = bits - _log2_floor(abs(x)) - 1
    if shift >= 0:
        return Fraction((x.numerator << shift) // x.denominator, 1 << shift)
    return Fraction((x.numerator // (x.denominator << -shift)) << -shift)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return -_floor_dyadic(-x, bits)


def _log2_floor(x: Fraction) -> int:
    # floor(log2(x)) for x > 0
    e = x.numerator.bit_length() - x.denominator.bit_length()
    if e >= 0:
        if x.numerator < (x.denominator << e):
            e -= 1
    elif (x.numerator << -e) < x.denominator:
        e -= 1
    return e


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval ``[lo, hi]`` with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: Number) -> "RationalInterval":
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        if isinstance(x, float):
            x = Fraction(x)
        return self.lo <= x <= self.hi

    __contains__ = contains

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def round_outward(self, bits: int) -> "RationalInterval":
        """Widen to dyadic endpoints carrying ``bits`` significant bits."""
        return RationalInterval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits))

    @staticmethod
    def _coerce(other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalInterval.point(other)
        return NotImplemented

    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return RationalInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.lo >= 0 and other.lo >= 0:
            return RationalInterval(self.lo * other.lo, self.hi * other.hi)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalInterval":
        if self.contains_zero():
            raise IntervalDivisionError(f"division by interval {self} containing 0")
        return RationalInterval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self.reciprocal()

    def __pow__(self, k: int):
        return interval_pow(self, k)

    def to_json(self) -> dict:
        return {"lo": fraction_to_json(self.lo), "hi": fraction_to_json(self.hi)}

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def fraction_to_json(x: Fraction) -> dict:
    x = Fraction(x)
    return {"num": str(x.numerator), "den": str(x.denominator)}


def fraction_from_json(d: dict) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def interval_pow(x: RationalInterval, k: int) -> RationalInterval:
    if k < 0:
        raise ValueError("negative exponent")
    if k == 0:
        return RationalInterval.point(1)
    a, b = x.lo**k, x.hi**k
    if k % 2 == 1 or x.lo >= 0:
        return RationalInterval(a, b)
    if x.hi <= 0:
        return RationalInterval(b, a)
    return RationalInterval(Fraction(0), max(a, b))


def interval_compare(x: RationalInterval, c: Number) -> Comparison:
    if x.lo > c:
        return Comparison.PROVEN_GREATER
    if x.hi < c:
        return Comparison.PROVEN_LESS
    return Comparison.UNDECIDED


def factorial(m: int) -> Fraction:
    if m < 0:
        raise ValueError("factorial of a negative integer")
    if m > FACTORIAL_GUARD:
        raise OverflowError(f"factorial argument {m} exceeds guard {FACTORIAL_GUARD}")
    return Fraction(math.factorial(m))


def _arctan_inv_bracket(x: int, terms: int) -> RationalInterval:
    """arctan(1/x) between consecutive partial sums of its alternating series."""
    s = Fraction(0)
    x2 = x * x
    power = x
    prev = s
    for k in range(terms + 1):
        prev = s
        term = Fraction(1, (2 * k + 1) * power)
        s = s + term if k % 2 == 0 else s - term
        power *= x2
    return RationalInterval(min(prev, s), max(prev, s))


@lru_cache(maxsize=64)
def pi_enclosure(precision_bits: int) -> RationalInterval:
    """Enclosure of pi of width at most ``2**-precision_bits``.

    Uses Machin's identity pi = 16 atan(1/5) - 4 atan(1/239).  The number of
    series terms is a nondecreasing function of the precision and partial sums
    of an alternating series nest, so enclosures are nested in the precision.
    """
    if precision_bits < 8:
        raise ValueError("precision_bits must be at least 8")
    # term k of atan(1/5) is below 5**-(2k+1); 16 times that must be tiny
    terms = precision_bits // 4 + 4
    target = Fraction(1, 1 << precision_bits)
    while True:
        enc = 16 * _arctan_inv_bracket(5, terms) - 4 * _arctan_inv_bracket(239, terms)
        if enc.width <= target:
            return enc
        terms *= 2


def sqrt_enclosure(n: int, precision_bits: int) -> RationalInterval:
    """Enclosure of sqrt(n) for a non-negative integer n."""
    if n < 0:
        raise ValueError("square root of a negative integer")
    shift = precision_bits + 2
    r = math.isqrt(n << (2 * shift))
    lo = Fraction(r, 1 << shift)
    hi = lo if r * r == n << (2 * shift) else Fraction(r + 1, 1 << shift)
    return RationalInterval(lo, hi)


def decide(
    make_interval: Callable[[int], RationalInterval],
    threshold: Number,
    precision_bits: int = DEFAULT_PRECISION_BITS,
    cap: int = MAX_PRECISION_BITS,
) -> tuple[Comparison, RationalInterval, int]:
    """Compare against ``threshold``, doubling precision while undecided."""
    bits = precision_bits
    while True:
        enc = make_interval(bits)
        verdict = interval_compare(enc, threshold)
        if verdict is not Comparison.UNDECIDED:
            return verdict, enc, bits
        if bits >= cap:
            raise PrecisionExhausted(
                f"comparison with {threshold} undecided at {bits} bits: {enc}"
            )
        bits = min(2 * bits, cap)
