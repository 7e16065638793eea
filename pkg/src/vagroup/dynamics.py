"""Orbits of Cantor points and the bookkeeping of singularity orbits.

Orbit finiteness is only semi-decided: iteration is bounded and a cycle is
reported only once a point repeats exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import ResourceLimitError
from .exact import CantorPoint
from .vamap import (
    DEFAULT_PIECE_BUDGET,
    VAElement,
    raw_inverse,
    va_canonical,
    va_eval,
    va_powers,
    va_singularities,
)

log = logging.getLogger(__name__)

MAX_STEPS = 10_000
MAX_BITS = 4096


@dataclass(frozen=True)
class Periodic:
    preperiod: int
    period: int


@dataclass(frozen=True)
class Unresolved:
    steps: int
    reason: str = "steps"


@dataclass(frozen=True)
class OrbitResult:
    classification: Periodic | Unresolved
    trace: tuple[CantorPoint, ...]

    @property
    def periodic(self) -> bool:
        return isinstance(self.classification, Periodic)


def orbit_trace(e: VAElement, x: CantorPoint, max_steps: int = MAX_STEPS, max_bits: int = MAX_BITS) -> OrbitResult:
    seen = {x: 0}
    trace = [x]
    cur = x
    for step in range(1, max_steps + 1):
        cur = va_eval(e, cur)
        if cur in seen:
            start = seen[cur]
            trace.append(cur)
            return OrbitResult(Periodic(start, step - start), tuple(trace))
        if cur.bits() > max_bits:
            trace.append(cur)
            log.debug("orbit of %s: precision bound hit after %d steps", x, step)
            return OrbitResult(Unresolved(step, "bits"), tuple(trace))
        seen[cur] = step
        trace.append(cur)
    return OrbitResult(Unresolved(max_steps), tuple(trace))


@dataclass(frozen=True)
class Yes:
    shift: int


@dataclass(frozen=True)
class No:
    pass


@dataclass(frozen=True)
class Unknown:
    pass


def _walk(e: VAElement, x: CantorPoint, n: int, max_bits: int) -> list[CantorPoint]:
    out = [x]
    for _ in range(n):
        x = va_eval(e, x)
        out.append(x)
        if x == out[0] or x.bits() > max_bits:
            break
    return out


def same_orbit(e: VAElement, s: CantorPoint, t: CantorPoint, bound: int, max_bits: int = MAX_BITS) -> Yes | No | Unknown:
    """``Yes(d)`` when ``e**d (s) = t`` was found with ``|d| <= bound``."""
    if s == t:
        return Yes(0)
    if bound <= 0:
        return Unknown()
    fwd = _walk(e, s, bound, max_bits)
    if t in fwd:
        return Yes(fwd.index(t))
    inv = raw_inverse(e)
    back = _walk(inv, s, bound, max_bits)
    if t in back:
        return Yes(-back.index(t))
    s_cycle = len(fwd) > 1 and fwd[-1] == s
    t_fwd = _walk(e, t, bound, max_bits)
    t_cycle = len(t_fwd) > 1 and t_fwd[-1] == t
    if s_cycle and t_cycle:
        return No()
    return Unknown()


@dataclass(frozen=True)
class OrbitPartition:
    """Singularities grouped by verified orbit shifts; shifts start at 0 in each class."""

    classes: tuple[tuple[tuple[CantorPoint, int], ...], ...]
    unresolved_pairs: tuple[tuple[CantorPoint, CantorPoint], ...] = field(default=())

    def class_of(self, s: CantorPoint) -> tuple[tuple[CantorPoint, int], ...]:
        for c in self.classes:
            if any(p == s for p, _ in c):
                return c
        raise KeyError(s)


def sing_orbit_partition(e: VAElement, bound: int = 64, max_bits: int = MAX_BITS) -> OrbitPartition:
    sings = list(va_singularities(e))
    if not sings:
        return OrbitPartition(())
    inv = raw_inverse(e)
    # position of each singularity relative to a class root
    root: dict[CantorPoint, tuple[CantorPoint, int]] = {}
    for s in sings:
        if s in root:
            continue
        root[s] = (s, 0)
        fwd = _walk(e, s, bound, max_bits)
        back = _walk(inv, s, bound, max_bits)
        for d, x in enumerate(fwd):
            if x in sings and x not in root:
                root[x] = (s, d)
        for d, x in enumerate(back):
            if x in sings and x not in root:
                root[x] = (s, -d)
    groups: dict[CantorPoint, list[tuple[CantorPoint, int]]] = {}
    for s in sings:
        r, d = root[s]
        groups.setdefault(r, []).append((s, d))
    classes = []
    for members in groups.values():
        lo = min(d for _, d in members)
        classes.append(tuple(sorted(((s, d - lo) for s, d in members), key=lambda sd: (sd[1], sd[0]))))
    classes.sort(key=lambda c: c[0][0])
    unresolved = []
    reps = [c[0][0] for c in classes]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if isinstance(same_orbit(e, reps[i], reps[j], bound, max_bits), Unknown):
                unresolved.append((reps[i], reps[j]))
    return OrbitPartition(tuple(classes), tuple(unresolved))


@dataclass(frozen=True)
class SingGrowth:
    counts: tuple[int, ...]
    # None when the single-singularity hypothesis does not apply
    set_check: bool | None
    sets: tuple[tuple[CantorPoint, ...], ...] = ()


def sing_growth(e: VAElement, K: int, budget: int = DEFAULT_PIECE_BUDGET) -> SingGrowth:
    """``|Sing(e**k)|`` for ``k = 1..K``; checks the backward-orbit set formula when it applies."""
    e = va_canonical(e)
    powers = va_powers(e, K, budget)
    sets = tuple(tuple(sorted(g.anchor for g in p.germs)) for p in powers)
    counts = tuple(len(s) for s in sets)
    sings = sorted(g.anchor for g in e.germs)
    if len(sings) != 1:
        return SingGrowth(counts, None, sets)
    s0 = sings[0]
    inv = raw_inverse(e)
    back = [s0]
    for _ in range(K - 1):
        back.append(va_eval(inv, back[-1]))
    if len(set(back)) != len(back):
        return SingGrowth(counts, None, sets)
    ok = all(set(sets[k - 1]) == set(back[:k]) for k in range(1, K + 1))
    return SingGrowth(counts, ok, sets)


def check_budget(e: VAElement, budget: int) -> None:
    if e.piece_count() > budget:
        raise ResourceLimitError(f"{e.piece_count()} pieces exceed budget {budget}")
