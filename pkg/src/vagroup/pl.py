"""Finite piecewise-linear maps with dyadic breaks and power-of-two slopes.

These are the elements of Thompson's group V, read as bijections of the
Cantor set.  An arc ``[lo, hi)`` is the set of Cantor points from ``lo+`` up
to ``hi-``, so the arc ending at 1 contains ``1-``.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .exact import ONE, ZERO, CantorPoint, Dyadic, Number, is_dyadic_fraction


@dataclass(frozen=True, slots=True)
class AffineMap:
    """``x -> 2**log2_slope * x + offset``."""

    log2_slope: int
    offset: Dyadic

    def __call__(self, x: Dyadic) -> Dyadic:
        return x.mul_pow2(self.log2_slope) + self.offset

    def apply_number(self, x: Number) -> Number:
        if isinstance(x, Dyadic):
            return self(x)
        return x * Fraction(2) ** self.log2_slope + self.offset.to_fraction()

    def apply(self, x: CantorPoint) -> CantorPoint:
        return CantorPoint(self.apply_number(x.value), x.side)

    def then(self, other: "AffineMap") -> "AffineMap":
        """``other ∘ self``."""
        return AffineMap(
            self.log2_slope + other.log2_slope,
            self.offset.mul_pow2(other.log2_slope) + other.offset,
        )

    def inverse(self) -> "AffineMap":
        e = self.log2_slope
        return AffineMap(-e, (-self.offset).mul_pow2(-e))

    def fixed_point(self) -> Number | None:
        if self.log2_slope == 0:
            return None
        fp = self.offset.to_fraction() / (1 - Fraction(2) ** self.log2_slope)
        return Dyadic.coerce(fp) if is_dyadic_fraction(fp) else fp

    @property
    def is_identity(self) -> bool:
        return self.log2_slope == 0 and self.offset.m == 0


IDENTITY_MAP = AffineMap(0, ZERO)


class Piece(NamedTuple):
    lo: Dyadic
    hi: Dyadic
    map: AffineMap

    @property
    def image_lo(self) -> Dyadic:
        return self.map(self.lo)

    @property
    def image_hi(self) -> Dyadic:
        return self.map(self.hi)

    def inverse(self) -> "Piece":
        return Piece(self.image_lo, self.image_hi, self.map.inverse())

    def contains(self, x: CantorPoint) -> bool:
        return arc_contains(self.lo, self.hi, x)


def arc_contains(lo: Dyadic, hi: Dyadic, x: CantorPoint) -> bool:
    v = x.value
    if x.side > 0:
        return lo <= v < hi
    if x.side < 0:
        return lo < v <= hi
    return lo < v < hi


def piece_from_arcs(lo: Dyadic, hi: Dyadic, c: Dyadic, d: Dyadic) -> Piece:
    """The increasing affine piece sending ``[lo, hi)`` onto ``[c, d)``."""
    if not (lo < hi and c < d):
        raise ValueError(f"empty arc in [{lo},{hi}) -> [{c},{d})")
    ratio = (d - c).to_fraction() / (hi - lo).to_fraction()
    n, den = ratio.numerator, ratio.denominator
    if n & (n - 1) or den & (den - 1):
        raise ValueError(f"slope {ratio} of [{lo},{hi}) -> [{c},{d}) is not a power of 2")
    e = (n.bit_length() - 1) - (den.bit_length() - 1)
    return Piece(lo, hi, AffineMap(e, c - lo.mul_pow2(e)))


def merge_pieces(pieces: Iterable[Piece]) -> list[Piece]:
    """Merge consecutive contiguous pieces that carry the same affine map."""
    out: list[Piece] = []
    for p in pieces:
        if out and out[-1].hi == p.lo and out[-1].map == p.map:
            out[-1] = Piece(out[-1].lo, p.hi, p.map)
        else:
            out.append(p)
    return out


def restrict(pieces: Sequence[Piece], lo: Dyadic, hi: Dyadic) -> list[Piece]:
    """Pieces of a sorted piece list clipped to ``[lo, hi)``."""
    out = []
    i = max(0, bisect.bisect_right([p.lo for p in pieces], lo) - 1)
    for p in pieces[i:]:
        if p.lo >= hi:
            break
        a = max(p.lo, lo)
        b = min(p.hi, hi)
        if a < b:
            out.append(Piece(a, b, p.map))
    return out


def compose_pieces(first: Sequence[Piece], second: Sequence[Piece]) -> list[Piece]:
    """Pieces of ``second ∘ first``; the images of ``first`` must be covered by ``second``.

    ``second`` is sorted by domain.  The result is in domain order of
    ``first`` (which therefore should be sorted too).
    """
    los = [p.lo for p in second]
    out: list[Piece] = []
    for f in first:
        a, b = f.image_lo, f.image_hi
        inv = f.map.inverse()
        i = bisect.bisect_right(los, a) - 1
        if i < 0:
            raise ValueError(f"image point {a} not covered")
        cur = a
        while cur < b:
            if i >= len(second) or not (second[i].lo <= cur < second[i].hi):
                raise ValueError(f"image arc [{a},{b}) not covered near {cur}")
            g = second[i]
            nxt = min(b, g.hi)
            out.append(Piece(inv(cur), inv(nxt), f.map.then(g.map)))
            cur = nxt
            i += 1
    return out


def invert_pieces(pieces: Iterable[Piece]) -> list[Piece]:
    return sorted((p.inverse() for p in pieces), key=lambda p: p.lo)


def find_piece(pieces: Sequence[Piece], x: CantorPoint, los: Sequence[Dyadic] | None = None) -> int:
    """Index of the piece containing ``x`` or -1."""
    if los is None:
        los = [p.lo for p in pieces]
    v = x.value
    if x.side < 0:
        i = bisect.bisect_left(los, v) - 1
    else:
        i = bisect.bisect_right(los, v) - 1
    if 0 <= i < len(pieces) and pieces[i].contains(x):
        return i
    return -1


def check_partition(arcs: Sequence[tuple[Dyadic, Dyadic]], what: str) -> str | None:
    arcs = sorted(arcs, key=lambda a: a[0])
    cur = ZERO
    for lo, hi in arcs:
        if not lo < hi:
            return f"{what}: empty arc [{lo},{hi})"
        if lo != cur:
            kind = "gap" if lo > cur else "overlap"
            return f"{what}: {kind} at {min(lo, cur)}"
        cur = hi
    if cur != ONE:
        return f"{what}: arcs end at {cur}, not 1"
    return None


def log2max(pieces: Iterable[Piece]) -> int:
    return max((abs(p.map.log2_slope) for p in pieces), default=0)


@dataclass(frozen=True)
class PLMap:
    """A finite piecewise-linear bijection of the Cantor set, canonically merged."""

    pieces: tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(merge_pieces(self.pieces)))
        err = check_partition([(p.lo, p.hi) for p in self.pieces], "domain")
        if err is None:
            err = check_partition([(p.image_lo, p.image_hi) for p in self.pieces], "image")
        if err is not None:
            raise ValueError(err)

    @classmethod
    def from_table(cls, rows: Iterable[tuple]) -> "PLMap":
        """Build from rows ``(lo, hi, c, d)`` meaning ``[lo,hi) -> [c,d)``."""
        return cls(tuple(piece_from_arcs(*(Dyadic.coerce(x) for x in r)) for r in rows))

    def __call__(self, x: CantorPoint) -> CantorPoint:
        return pl_eval(self, x)

    def __mul__(self, other: "PLMap") -> "PLMap":
        return pl_compose(self, other)

    def __str__(self) -> str:
        body = " ; ".join(format_piece(p) for p in self.pieces)
        return f"pl{{ {body} }}"

    def breakpoints(self) -> list[Dyadic]:
        return [p.lo for p in self.pieces[1:]]


def format_piece(p: Piece) -> str:
    return f"[{p.lo},{p.hi}) -> [{p.image_lo},{p.image_hi})"


IDENTITY = PLMap((Piece(ZERO, ONE, IDENTITY_MAP),))


def pl_eval(f: PLMap, x: CantorPoint) -> CantorPoint:
    i = find_piece(f.pieces, x)
    return f.pieces[i].map.apply(x)


def pl_compose(f: PLMap, g: PLMap) -> PLMap:
    """``f·g``: apply ``f`` first, then ``g``."""
    return PLMap(tuple(compose_pieces(f.pieces, g.pieces)))


def pl_invert(f: PLMap) -> PLMap:
    return PLMap(tuple(invert_pieces(f.pieces)))


def pl_equal(f: PLMap, g: PLMap) -> bool:
    return f.pieces == g.pieces


def pl_power(f: PLMap, k: int) -> PLMap:
    if k < 0:
        f, k = pl_invert(f), -k
    out = IDENTITY
    for _ in range(k):
        out = pl_compose(out, f)
    return out


@dataclass(frozen=True)
class FixedPoint:
    point: CantorPoint
    log2_slope: int


def pl_fixed_points(f: PLMap | Sequence[Piece]) -> tuple[list[FixedPoint], list[tuple[Dyadic, Dyadic]]]:
    """Isolated fixed points of the non-unit-slope pieces, and the identity arcs.

    A fixed point on the closed arc ``[lo, hi]`` of a piece is reported with
    the side from which the piece reaches it (``lo+`` or ``hi-``).
    """
    pieces = f.pieces if isinstance(f, PLMap) else f
    points = []
    arcs: list[tuple[Dyadic, Dyadic]] = []
    for p in pieces:
        if p.map.is_identity:
            if arcs and arcs[-1][1] == p.lo:
                arcs[-1] = (arcs[-1][0], p.hi)
            else:
                arcs.append((p.lo, p.hi))
            continue
        x = p.map.fixed_point()
        if x is None:
            continue
        if isinstance(x, Dyadic):
            if x == p.lo:
                points.append(FixedPoint(CantorPoint(x, 1), p.map.log2_slope))
            elif x == p.hi:
                points.append(FixedPoint(CantorPoint(x, -1), p.map.log2_slope))
            elif p.lo < x < p.hi:
                points.append(FixedPoint(CantorPoint(x, -1), p.map.log2_slope))
                points.append(FixedPoint(CantorPoint(x, 1), p.map.log2_slope))
        elif p.lo < x < p.hi:
            points.append(FixedPoint(CantorPoint(x), p.map.log2_slope))
    return points, arcs


# Standard generators of V (Cannon-Floyd-Parry A, B, C, pi0).
X0 = PLMap.from_table([
    (0, Fraction(1, 2), 0, Fraction(1, 4)),
    (Fraction(1, 2), Fraction(3, 4), Fraction(1, 4), Fraction(1, 2)),
    (Fraction(3, 4), 1, Fraction(1, 2), 1),
])
X1 = PLMap.from_table([
    (0, Fraction(1, 2), 0, Fraction(1, 2)),
    (Fraction(1, 2), Fraction(3, 4), Fraction(1, 2), Fraction(5, 8)),
    (Fraction(3, 4), Fraction(7, 8), Fraction(5, 8), Fraction(3, 4)),
    (Fraction(7, 8), 1, Fraction(3, 4), 1),
])
C_GEN = PLMap.from_table([
    (0, Fraction(1, 2), Fraction(3, 4), 1),
    (Fraction(1, 2), Fraction(3, 4), 0, Fraction(1, 2)),
    (Fraction(3, 4), 1, Fraction(1, 2), Fraction(3, 4)),
])
PI0 = PLMap.from_table([
    (0, Fraction(1, 2), 0, Fraction(1, 2)),
    (Fraction(1, 2), Fraction(3, 4), Fraction(3, 4), 1),
    (Fraction(3, 4), 1, Fraction(1, 2), Fraction(3, 4)),
])
SWAP = PLMap.from_table([
    (0, Fraction(1, 2), Fraction(1, 2), 1),
    (Fraction(1, 2), 1, 0, Fraction(1, 2)),
])

V_GENERATORS = {"x0": X0, "x1": X1, "C": C_GEN, "pi0": PI0}


def random_plmap(rng: random.Random, depth: int) -> PLMap:
    """Product of ``depth`` uniformly chosen standard generators or inverses."""
    gens = list(V_GENERATORS.values())
    gens = gens + [pl_invert(g) for g in gens]
    out = IDENTITY
    for _ in range(depth):
        out = pl_compose(out, rng.choice(gens))
    return out
