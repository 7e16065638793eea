"""Exact numbers: dyadic rationals, general rationals and points of the Cantor set.

Points of the Cantor set are labelled by numbers in [0, 1].  A dyadic number
``p`` has two binary expansions, so it splits into ``p-`` (the limit from the
left) and ``p+`` (the limit from the right).  Non-dyadic points are plain
rationals; irrational points never arise.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Rat = Fraction


def floor_log2(x: Fraction) -> int:
    """Largest integer ``n`` with ``2**n <= x`` for a positive rational ``x``."""
    a, b = x.numerator, x.denominator
    if a <= 0:
        raise ValueError("floor_log2 of a non-positive number")
    n = a.bit_length() - b.bit_length()
    # now 2**(n-1) < a/b < 2**(n+1)
    if n >= 0:
        if a < (b << n):
            n -= 1
    else:
        if (a << -n) < b:
            n -= 1
    return n


@total_ordering
class Dyadic:
    """The number ``mantissa * 2**exponent`` kept in lowest terms."""

    __slots__ = ("m", "e", "_hash")

    def __init__(self, mantissa: int, exponent: int = 0):
        m, e = int(mantissa), int(exponent)
        if m == 0:
            e = 0
        else:
            tz = (m & -m).bit_length() - 1
            if tz:
                m >>= tz
                e += tz
        self.m = m
        self.e = e
        self._hash = None

    @classmethod
    def coerce(cls, x: Union["Dyadic", int, Fraction, str]) -> "Dyadic":
        if isinstance(x, Dyadic):
            return x
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, Fraction):
            d = x.denominator
            if d & (d - 1):
                raise ValueError(f"{x} is not dyadic")
            return cls(x.numerator, -(d.bit_length() - 1))
        if isinstance(x, str):
            return parse_dyadic(x)
        raise TypeError(f"cannot make a Dyadic from {x!r}")

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            other = Dyadic.coerce(other)
        a, b = self, other
        if a.m == 0:
            return b
        if b.m == 0:
            return a
        if a.e <= b.e:
            return Dyadic(a.m + (b.m << (b.e - a.e)), a.e)
        return Dyadic((a.m << (a.e - b.e)) + b.m, b.e)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.m, self.e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            other = Dyadic.coerce(other)
        return self + (-other)

    def __rsub__(self, other) -> "Dyadic":
        return Dyadic.coerce(other) - self

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            other = Dyadic.coerce(other)
        return Dyadic(self.m * other.m, self.e + other.e)

    __rmul__ = __mul__

    def mul_pow2(self, k: int) -> "Dyadic":
        if self.m == 0:
            return self
        return Dyadic(self.m, self.e + k)

    def __abs__(self) -> "Dyadic":
        return self if self.m >= 0 else -self

    # -- comparison -------------------------------------------------------
    def sign(self) -> int:
        return (self.m > 0) - (self.m < 0)

    def _cmp(self, other) -> int:
        if isinstance(other, Dyadic):
            return (self - other).sign()
        f = self.to_fraction()
        return (f > other) - (f < other)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.m == other.m and self.e == other.e
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if not isinstance(other, (Dyadic, int, Fraction)):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.to_fraction())
        return self._hash

    # -- conversion -------------------------------------------------------
    def to_fraction(self) -> Fraction:
        if self.e >= 0:
            return Fraction(self.m << self.e)
        return Fraction(self.m, 1 << -self.e)

    def __float__(self) -> float:
        return float(self.to_fraction())

    def bits(self) -> int:
        """Precision used by the numeral: mantissa bits plus fractional bits."""
        return self.m.bit_length() + max(0, -self.e)

    def __str__(self) -> str:
        if self.e >= 0:
            return str(self.m << self.e)
        return f"{self.m}/2^{-self.e}"

    def __repr__(self) -> str:
        return f"Dyadic({self})"


ZERO = Dyadic(0)
ONE = Dyadic(1)
HALF = Dyadic(1, -1)

Number = Union[Dyadic, Fraction]


def as_fraction(x: Number) -> Fraction:
    return x.to_fraction() if isinstance(x, Dyadic) else x


def is_dyadic_fraction(x: Fraction) -> bool:
    d = x.denominator
    return d & (d - 1) == 0


@total_ordering
class CantorPoint:
    """A point of the Cantor set.

    ``side`` is +1 or -1 for a dyadic ``value`` and 0 for a non-dyadic
    rational.  The point 0 only exists as ``0+`` and 1 only as ``1-``.
    """

    __slots__ = ("value", "side")

    def __init__(self, value: Number, side: int = 0):
        if isinstance(value, int):
            value = Dyadic(value)
        if isinstance(value, Fraction):
            if is_dyadic_fraction(value):
                value = Dyadic.coerce(value)
            elif side != 0:
                raise ValueError(f"non-dyadic point {value} cannot carry a side")
        if isinstance(value, Dyadic):
            if side not in (1, -1):
                raise ValueError(f"dyadic point {value} needs side + or -")
            if value < ZERO or value > ONE:
                raise ValueError(f"{value} is outside [0, 1]")
            if value == ZERO and side < 0:
                raise ValueError("0- is not a point of the Cantor set")
            if value == ONE and side > 0:
                raise ValueError("1+ is not a point of the Cantor set")
        else:
            if not 0 < value < 1:
                raise ValueError(f"{value} is outside (0, 1)")
        self.value = value
        self.side = side

    @property
    def is_dyadic(self) -> bool:
        return self.side != 0

    def key(self):
        return (as_fraction(self.value), self.side)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CantorPoint):
            return NotImplemented
        return self.side == other.side and self.value == other.value

    def __lt__(self, other: "CantorPoint") -> bool:
        if not isinstance(other, CantorPoint):
            return NotImplemented
        if self.side and other.side:
            c = self.value._cmp(other.value)
            if c:
                return c < 0
            return self.side < other.side
        return self.key() < other.key()

    def __hash__(self) -> int:
        return hash((self.value, self.side))

    def bits(self) -> int:
        if self.side:
            return self.value.bits()
        return max(self.value.numerator.bit_length(), self.value.denominator.bit_length())

    def __str__(self) -> str:
        if self.side:
            return f"{self.value}{'+' if self.side > 0 else '-'}"
        return f"{self.value.numerator}/{self.value.denominator}"

    def __repr__(self) -> str:
        return f"CantorPoint({self})"


def point_compare(x: CantorPoint, y: CantorPoint) -> int:
    """-1, 0 or 1 as ``x`` is before, equal to or after ``y``."""
    if x == y:
        return 0
    return -1 if x < y else 1


_DYADIC_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)(?:\s*\^\s*(\d+))?)?\s*$")


def parse_dyadic(text: str) -> Dyadic:
    """Parse ``m/2^k``, ``m/d`` with ``d`` a power of two, or an integer."""
    mt = _DYADIC_RE.match(text)
    if not mt:
        raise ValueError(f"bad dyadic {text!r}")
    num, base, exp = mt.groups()
    if base is None:
        return Dyadic(int(num))
    if exp is not None:
        if base != "2":
            raise ValueError(f"bad dyadic {text!r}: base must be 2")
        return Dyadic(int(num), -int(exp))
    return Dyadic.coerce(Fraction(int(num), int(base)))


def parse_number(text: str) -> Number:
    """A dyadic if the value is dyadic, otherwise a rational ``a/b``."""
    try:
        return parse_dyadic(text)
    except ValueError:
        pass
    f = Fraction(text.strip())
    return Dyadic.coerce(f) if is_dyadic_fraction(f) else f


def parse_point(text: str) -> CantorPoint:
    t = text.strip()
    if t.endswith("+") or t.endswith("-"):
        side = 1 if t[-1] == "+" else -1
        return CantorPoint(parse_dyadic(t[:-1]), side)
    v = parse_number(t)
    if isinstance(v, Dyadic):
        raise ValueError(f"dyadic point {t!r} needs a side (+ or -)")
    return CantorPoint(v)


def format_number(x: Number) -> str:
    if isinstance(x, Dyadic):
        return str(x)
    return f"{x.numerator}/{x.denominator}"
