"""Rigorous intervals with rational endpoints and outward dyadic rounding.

Irrational quantities (d-th roots of exact rationals) are enclosed by
rational intervals whose width is controlled by a working precision in bits.
Comparisons that fail to separate are retried at doubled precision up to a
cap; past the cap the answer is ``None`` (indeterminate).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import gmpy2

DEFAULT_BITS = 128
PRECISION_CAP_ENV = "LORENTZKIT_PRECISION_CAP"


def precision_cap() -> int:
    raw = os.environ.get(PRECISION_CAP_ENV)
    if raw is None:
        return 2048
    cap = int(raw)
    if cap < DEFAULT_BITS:
        raise ValueError(f"{PRECISION_CAP_ENV} must be at least {DEFAULT_BITS}")
    return cap


def _round_down(x: Fraction, bits: int) -> Fraction:
    if x.denominator == 1 or x == 0:
        return x
    shift = bits - x.numerator.bit_length() + x.denominator.bit_length()
    if shift <= 0:
        return Fraction(x.numerator // x.denominator)
    return Fraction((x.numerator << shift) // x.denominator, 1 << shift)


def _round_up(x: Fraction, bits: int) -> Fraction:
    return -_round_down(-x, bits)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, x) -> "Interval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def rounded(self, bits: int) -> "Interval":
        return Interval(_round_down(self.lo, bits), _round_up(self.hi, bits))

    def __add__(self, other):
        other = _lift(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        products = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _lift(other)
        if other.lo <= 0 <= other.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * Interval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _lift(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return 1 / (self**-n)
        if n % 2 == 1 or self.lo >= 0:
            return Interval(self.lo**n, self.hi**n)
        if self.hi <= 0:
            return Interval(self.hi**n, self.lo**n)
        return Interval(Fraction(0), max(self.lo**n, self.hi**n))

    def __float__(self):
        return float(self.midpoint())

    def __repr__(self):
        if self.is_exact:
            return f"Interval({self.lo})"
        return f"Interval([{float(self.lo):.12g}, {float(self.hi):.12g}])"


def _lift(x) -> Interval:
    return x if isinstance(x, Interval) else Interval.exact(x)


def root(x, n: int, bits: int = DEFAULT_BITS) -> Interval:
    """Enclosure of the real ``n``-th root of ``x >= 0`` (exact when rational)."""
    x = _lift(x)
    if x.lo < 0:
        raise ValueError("root of a possibly negative number")
    return Interval(_root_bound(x.lo, n, bits, upper=False), _root_bound(x.hi, n, bits, upper=True))


def _root_bound(x: Fraction, n: int, bits: int, upper: bool) -> Fraction:
    if x == 0:
        return Fraction(0)
    p, q = x.numerator, x.denominator
    # exact rational root if both parts are perfect powers
    rp, p_exact = gmpy2.iroot(gmpy2.mpz(p), n)
    rq, q_exact = gmpy2.iroot(gmpy2.mpz(q), n)
    if p_exact and q_exact:
        return Fraction(int(rp), int(rq))
    # root(p/q) = root(p * q^(n-1) * 2^(n*k)) / (q * 2^k)
    k = bits + max(0, (q.bit_length() - p.bit_length()) // n + 1)
    scaled = p * q ** (n - 1) << (n * k)
    r, is_exact = gmpy2.iroot(gmpy2.mpz(scaled), n)
    r = int(r)
    if upper and not is_exact:
        r += 1
    return Fraction(r, q << k)


def rational_root(x: Fraction, n: int) -> Fraction | None:
    """Exact rational n-th root of ``x >= 0`` if it exists."""
    if x < 0:
        return None
    rp, p_exact = gmpy2.iroot(gmpy2.mpz(x.numerator), n)
    rq, q_exact = gmpy2.iroot(gmpy2.mpz(x.denominator), n)
    if p_exact and q_exact:
        return Fraction(int(rp), int(rq))
    return None


def compare_le(compute: Callable[[int], tuple[Interval, Interval]], start_bits: int = DEFAULT_BITS):
    """Decide ``lhs <= rhs`` where both sides are computed at a given precision.

    Returns ``(verdict, lhs, rhs, bits)`` where verdict is True, False or None
    (indeterminate after reaching the cap).  Exact equality of degenerate
    intervals counts as True.
    """
    cap = precision_cap()
    bits = start_bits
    while True:
        lhs, rhs = (_lift(v) for v in compute(bits))
        if lhs.hi <= rhs.lo:
            return True, lhs, rhs, bits
        if lhs.lo > rhs.hi:
            return False, lhs, rhs, bits
        if bits >= cap:
            return None, lhs, rhs, bits
        bits = min(bits * 2, cap)
