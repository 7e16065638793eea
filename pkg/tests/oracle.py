"""Independent evaluation oracles.

A point is an eventually periodic binary sequence ``prefix + period^inf``:
``p+`` ends in zeros, ``p-`` ends in ones, other rationals come from long
division.  Tree pairs act by prefix replacement, which is how V acts on the
Cantor set, without any affine arithmetic.  Germs are evaluated straight from
the self-similarity relation ``f(p + (x-p)/2) = q + (f(x) - q)/2``.
"""

from __future__ import annotations

from fractions import Fraction

from vagroup.exact import CantorPoint, Dyadic
from vagroup.treepair import TreePair


def to_seq(x: CantorPoint) -> tuple[str, str]:
    if x.side:
        v = x.value.to_fraction()
        k = max(0, -x.value.e)
        n = int(v * 2**k)
        if x.side > 0:
            return (format(n, f"0{k}b") if k else ""), "0"
        # p- = digits of p - 2^-k followed by ones
        return (format(n - 1, f"0{k}b") if k else ""), "1"
    r = x.value
    digits, seen = [], {}
    num, den = r.numerator, r.denominator
    while num not in seen:
        seen[num] = len(digits)
        num *= 2
        digits.append("1" if num >= den else "0")
        num %= den
    i = seen[num]
    return "".join(digits[:i]), "".join(digits[i:])


def from_seq(prefix: str, period: str) -> CantorPoint:
    if period == "0" * len(period):
        k = len(prefix)
        return CantorPoint(Dyadic(int(prefix or "0", 2), -k), 1)
    if period == "1" * len(period):
        k = len(prefix)
        return CantorPoint(Dyadic(int(prefix or "0", 2) + 1, -k), -1)
    u = Fraction(int(prefix or "0", 2))
    v = Fraction(int(period, 2), 2 ** len(period) - 1)
    return CantorPoint((u + v) / 2 ** len(prefix))


def tp_apply(tp: TreePair, x: CantorPoint) -> CantorPoint:
    prefix, period = to_seq(x)
    need = max(len(s) for s in tp.source)
    while len(prefix) < need:
        prefix += period
    for s, t in tp.pairs():
        if prefix.startswith(s):
            return from_seq(t + prefix[len(s):], period)
    raise AssertionError("source leaves do not cover the sequence")


def germ_apply(p: Fraction, q: Fraction, side: int, eps: Fraction, table, x: CantorPoint) -> Fraction:
    """Value of ``f(x)`` for a germ at ``p^side -> q^side``; ``table`` holds the
    level-0 annulus rows ``(lo, hi, c, d)`` as Fractions.  A left-sided point
    belongs to the piece that ends at it."""
    xv = x.value.to_fraction() if x.side else x.value

    def inside(a, b, y):
        return a < y <= b if x.side < 0 else a <= y < b

    lo, hi = (p + eps / 2, p + eps) if side > 0 else (p - eps, p - eps / 2)
    k = 0
    while True:
        y = p + (xv - p) * 2**k
        if inside(lo, hi, y):
            break
        k += 1 if abs(y - p) <= eps / 2 else -1
    for a, b, c, d in table:
        if inside(a, b, y):
            fy = c + (y - a) * (d - c) / (b - a)
            return q + (fy - q) / 2**k
    raise AssertionError("annulus table does not cover the point")
