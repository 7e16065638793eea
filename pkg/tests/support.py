"""Seeded random elements and points shared by the tests."""

from __future__ import annotations

import random
from fractions import Fraction

from vagroup.exact import CantorPoint, Dyadic
from vagroup.vamap import IDENTITY, VAElement, va_compose
from vagroup.wordlen import default_genset

_S = None


def genset():
    global _S
    if _S is None:
        _S = default_genset()
    return _S


def random_word(rng: random.Random, length: int) -> VAElement:
    letters = genset().letters()
    e = IDENTITY
    for _ in range(length):
        e = va_compose(e, rng.choice(letters)[1])
    return e


def random_element(rng: random.Random, max_len: int = 5) -> VAElement:
    return random_word(rng, rng.randint(1, max_len))


def random_point(rng: random.Random) -> CantorPoint:
    """Mostly sided dyadics (some deep), some rationals with odd denominators."""
    r = rng.random()
    if r < 0.75:
        k = rng.choice([1, 2, 3, 4, 6, 10, 20, 40])
        m = rng.randrange(0, 1 << k)
        side = rng.choice([1, -1])
        if m == 0:
            side = 1
        return CantorPoint(Dyadic(m, -k), side)
    q = rng.choice([3, 5, 7, 9, 11, 13, 3 * 64, 5 * 1024])
    while True:
        x = Fraction(rng.randrange(1, q), q)
        if x.denominator & (x.denominator - 1):
            return CantorPoint(x)


def points(seed: int, n: int) -> list[CantorPoint]:
    rng = random.Random(seed)
    return [random_point(rng) for _ in range(n)]
