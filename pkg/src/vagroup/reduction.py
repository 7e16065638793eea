"""Conjugating an element to at most one singularity per orbit, and into V.

``detach_singularity`` removes the last singularity ``s_m`` of a labelled orbit
segment: ``f'`` agrees with ``f`` off a small one-sided neighbourhood ``U`` of
``s_m`` and is finitely piecewise-linear on ``U``; with ``a = f·f'^{-1}`` the
conjugate ``a^{-1}·f·a`` no longer has ``s_m`` as a singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DomainError
from .exact import CantorPoint, Dyadic
from .pl import Piece, merge_pieces, piece_from_arcs
from .treepair import standard_cover
from .vamap import (
    IDENTITY,
    VAElement,
    canonicalize,
    raw_inverse,
    va_canonical,
    va_compose,
    va_equal,
    va_eval,
    va_invert,
    va_singularities,
)
from .dynamics import OrbitPartition, sing_orbit_partition


def dyadic_interpolate(src: tuple[Dyadic, Dyadic], dst: tuple[Dyadic, Dyadic]) -> list[Piece]:
    """Increasing finite PL bijection ``[a, b) -> [c, d)`` with power-of-two slopes.

    Both arcs are split greedily into aligned standard dyadic arcs; the shorter
    list is refined by halving its longest arc until the counts match.
    """
    a_parts = standard_cover(*src)
    b_parts = standard_cover(*dst)

    def refine(parts, n):
        parts = list(parts)
        while len(parts) < n:
            i = max(range(len(parts)), key=lambda j: (parts[j][1] - parts[j][0], -j))
            lo, hi = parts[i]
            mid = lo + (hi - lo).mul_pow2(-1)
            parts[i:i + 1] = [(lo, mid), (mid, hi)]
        return parts

    n = max(len(a_parts), len(b_parts))
    a_parts, b_parts = refine(a_parts, n), refine(b_parts, n)
    return merge_pieces(piece_from_arcs(lo, hi, c, d) for (lo, hi), (c, d) in zip(a_parts, b_parts))


@dataclass(frozen=True)
class Detachment:
    a: VAElement
    f_conj: VAElement
    f_prime: VAElement
    u: tuple[Dyadic, Dyadic]
    s_m: CantorPoint


def _inside(u: tuple[Dyadic, Dyadic], x: CantorPoint) -> bool:
    from .pl import arc_contains

    return arc_contains(u[0], u[1], x)


def verify_labelling(f: VAElement, labelled: tuple[tuple[CantorPoint, int], ...]) -> None:
    """Raise unless every ``(point, shift)`` satisfies ``f**shift (s_0) = point``."""
    if not labelled:
        raise DomainError("empty orbit labelling")
    s0, d0 = labelled[0]
    if d0 != 0:
        raise DomainError("labelling must start at shift 0")
    cur, pos = s0, 0
    for pt, d in labelled:
        if d < pos:
            raise DomainError("labelling shifts must be non-decreasing")
        while pos < d:
            cur = va_eval(f, cur)
            pos += 1
        if cur != pt:
            raise DomainError(f"unverified shift: f^{d}({s0}) = {cur}, not {pt}")


def detach_singularity(f: VAElement, labelled: tuple[tuple[CantorPoint, int], ...]) -> Detachment:
    f = va_canonical(f)
    verify_labelling(f, labelled)
    s_m, m = labelled[-1]
    germ = f.germ_at(s_m)
    if germ is None:
        raise DomainError(f"{s_m} is not a singularity")
    s_next = va_eval(f, s_m)
    s_prev = va_eval(raw_inverse(f), s_m)
    avoid = [p for p, _ in labelled if p != s_m] + [s_prev, s_next]
    avoid += [g.anchor for g in f.germs if g.anchor != s_m]
    r = germ.eps
    while True:
        u = germ.nbhd(r)
        fu = germ.shrink(r)[0].image_nbhd()
        clash = any(_inside(u, x) for x in avoid if x != s_m) or (
            fu[0] < u[1] and u[0] < fu[1]
        )
        if not clash:
            break
        r = r.mul_pow2(-1)
    small, rest = germ.shrink(r)
    pieces = list(f.pieces) + rest + dyadic_interpolate(u, fu)
    others = [g for g in f.germs if g.anchor != s_m]
    f_prime = canonicalize(sorted(pieces, key=lambda p: p.lo), others)
    a = va_compose(f, va_invert(f_prime))
    f_conj = va_compose(va_compose(va_invert(a), f), a)
    return Detachment(a, f_conj, f_prime, u, s_m)


@dataclass(frozen=True)
class Step:
    orbit: int
    removed: CantorPoint
    # what happened to s_{m-1}: gained / retained / lost / absent
    prev_status: str


@dataclass(frozen=True)
class ReductionReport:
    conjugator: VAElement
    result: VAElement
    steps: tuple[Step, ...]
    unresolved_pairs: tuple[tuple[CantorPoint, CantorPoint], ...] = field(default=())

    @property
    def partial(self) -> bool:
        return bool(self.unresolved_pairs)


def _status(before: bool, after: bool) -> str:
    return {(False, True): "gained", (True, True): "retained", (True, False): "lost"}.get((before, after), "absent")


def reduce_orbits(f: VAElement, bound: int = 64, max_iter: int = 256) -> ReductionReport:
    """Conjugate ``f`` until each resolved orbit carries at most one singularity.

    Orbits are worked in descending order of singularity count.  Pairs of
    singularities whose orbit relation stays unknown within ``bound`` are
    reported and make the report partial.
    """
    f = va_canonical(f)
    c = IDENTITY
    steps = []
    part = sing_orbit_partition(f, bound)
    for _ in range(max_iter):
        multi = [(i, cl) for i, cl in enumerate(part.classes) if len(cl) > 1]
        if not multi:
            break
        i, cl = min(multi, key=lambda icl: (-len(icl[1]), icl[1][0][0]))
        s_m, _ = cl[-1]
        s_prev = va_eval(raw_inverse(f), s_m)
        before = s_prev in set(va_singularities(f))
        det = detach_singularity(f, cl)
        f = det.f_conj
        c = va_compose(c, det.a)
        after = s_prev in set(va_singularities(f))
        steps.append(Step(i, s_m, _status(before, after)))
        part = sing_orbit_partition(f, bound)
    else:
        raise DomainError("reduction did not terminate within the iteration limit")
    return ReductionReport(c, f, tuple(steps), part.unresolved_pairs)


def check_report(f: VAElement, rep: ReductionReport) -> bool:
    """The conjugacy equation ``c^{-1}·f·c = result``, exactly."""
    c = rep.conjugator
    return va_equal(va_compose(va_compose(va_invert(c), f), c), rep.result)


@dataclass(frozen=True)
class IntoV:
    conjugator: VAElement
    v: VAElement


@dataclass(frozen=True)
class NotFiniteOrder:
    certificate: object


@dataclass(frozen=True)
class UnknownOrder:
    reason: str


def conjugate_into_v(f: VAElement, bound: int = 64, n_max: int = 64) -> IntoV | NotFiniteOrder | UnknownOrder:
    from .certify import NoCertificate, infinite_order_certificate

    f = va_canonical(f)
    if not f.germs:
        return IntoV(IDENTITY, f)
    rep = reduce_orbits(f, bound)
    if not rep.result.germs:
        return IntoV(rep.conjugator, rep.result)
    cert = infinite_order_certificate(rep.result, bound=bound, n_max=n_max)
    if isinstance(cert, NoCertificate):
        return UnknownOrder("singularities remain after reduction and no certificate was found")
    return NotFiniteOrder(cert)


def partition_summary(part: OrbitPartition) -> list[str]:
    return [", ".join(f"{p}@{d}" for p, d in cl) for cl in part.classes]
