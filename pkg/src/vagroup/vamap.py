"""Elements of the group V𝒜.

An element is a finite list of explicit affine pieces together with finitely
many *germs*.  A germ encodes the map on a one-sided neighbourhood of a
singularity ``p±``: the map is given on the fundamental annulus (the outer
half of the neighbourhood) and extended towards ``p`` by the self-similarity
``f ∘ L_p = L_q ∘ f`` with ``L_r(x) = 2(x - r) + r``.

Canonical form
--------------
Every germ radius is pushed out to the largest radius on which the map stays
self-similar, capped at half the distance to the nearest facing singularity
(the whole distance if the next singularity faces away) and at the boundary
of [0, 1].  With radii fixed this way the explicit part is determined, so the
printed canonical form identifies the element.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .errors import ResourceLimitError
from .exact import ONE, ZERO, CantorPoint, Dyadic, as_fraction, floor_log2
from .pl import (
    IDENTITY_MAP,
    AffineMap,
    Piece,
    PLMap,
    arc_contains,
    check_partition,
    compose_pieces,
    find_piece,
    format_piece,
    invert_pieces,
    merge_pieces,
    restrict,
)

DEFAULT_PIECE_BUDGET = 1 << 16


def _level_piece(piece: Piece, k: int, p: Dyadic, q: Dyadic) -> Piece:
    """Conjugate a piece by ``L_p**k`` on the source and ``L_q**k`` on the target."""
    e = piece.map.log2_slope
    lo = p + (piece.lo - p).mul_pow2(-k)
    hi = p + (piece.hi - p).mul_pow2(-k)
    ep = p.mul_pow2(e)
    off = q - ep + (ep + piece.map.offset - q).mul_pow2(-k)
    return Piece(lo, hi, AffineMap(e, off))


def _level_range(eps: Dyadic, near: Dyadic, far: Dyadic) -> range:
    k_hi = floor_log2(eps.to_fraction() / near.to_fraction()) + 1
    k_lo = floor_log2(eps.to_fraction() / far.to_fraction()) - 1
    return range(k_lo, k_hi + 1)


@dataclass(frozen=True)
class Germ:
    """A self-similar singularity ``p^side -> q^side``.

    ``annulus`` covers ``[p + eps/2, p + eps)`` for side ``+`` and
    ``[p - eps, p - eps/2)`` for side ``-`` and is continuous there.
    """

    p: Dyadic
    side: int
    q: Dyadic
    eps: Dyadic
    annulus: tuple[Piece, ...]

    @property
    def anchor(self) -> CantorPoint:
        return CantorPoint(self.p, self.side)

    @property
    def image(self) -> CantorPoint:
        return CantorPoint(self.q, self.side)

    def nbhd(self, radius: Dyadic | None = None) -> tuple[Dyadic, Dyadic]:
        r = self.eps if radius is None else radius
        return (self.p, self.p + r) if self.side > 0 else (self.p - r, self.p)

    def annulus_arc(self, radius: Dyadic | None = None) -> tuple[Dyadic, Dyadic]:
        r = self.eps if radius is None else radius
        h = r.mul_pow2(-1)
        if self.side > 0:
            return self.p + h, self.p + r
        return self.p - r, self.p - h

    @property
    def delta(self) -> Dyadic:
        """Radius of the image neighbourhood."""
        if self.side > 0:
            return self.annulus[-1].image_hi - self.q
        return self.q - self.annulus[0].image_lo

    def image_nbhd(self) -> tuple[Dyadic, Dyadic]:
        d = self.delta
        return (self.q, self.q + d) if self.side > 0 else (self.q - d, self.q)

    def contains(self, x: CantorPoint) -> bool:
        return arc_contains(*self.nbhd(), x)

    def pieces_on(self, lo: Dyadic, hi: Dyadic) -> list[Piece]:
        """The self-similar extension on ``[lo, hi)``, which must avoid the anchor.

        The arc may reach beyond the current radius (levels below zero).
        """
        if self.side > 0:
            if not lo > self.p:
                raise ValueError("arc touches the germ anchor")
            near, far = lo - self.p, hi - self.p
        else:
            if not hi < self.p:
                raise ValueError("arc touches the germ anchor")
            near, far = self.p - hi, self.p - lo
        out = []
        for k in _level_range(self.eps, near, far):
            for piece in self.annulus:
                lp = _level_piece(piece, k, self.p, self.q)
                a, b = max(lp.lo, lo), min(lp.hi, hi)
                if a < b:
                    out.append(Piece(a, b, lp.map))
        out.sort(key=lambda pc: pc.lo)
        return out

    def level_of(self, x: CantorPoint) -> int:
        d = abs(as_fraction(x.value) - self.p.to_fraction())
        k0 = floor_log2(self.eps.to_fraction() / d)
        for k in (k0 - 1, k0, k0 + 1):
            lo, hi = self.annulus_arc(self.eps.mul_pow2(-k))
            if arc_contains(lo, hi, x):
                return k
        raise ValueError(f"{x} is not in the punctured neighbourhood of {self.anchor}")

    def local_piece(self, x: CantorPoint) -> Piece:
        """The level piece containing a non-anchor point ``x``."""
        k = self.level_of(x)
        for piece in self.annulus:
            lp = _level_piece(piece, k, self.p, self.q)
            if lp.contains(x):
                return lp
        raise AssertionError("annulus does not cover its arc")

    def eval(self, x: CantorPoint) -> CantorPoint:
        if x == self.anchor:
            return self.image
        return self.local_piece(x).map.apply(x)

    def inverse(self) -> "Germ":
        return Germ(self.q, self.side, self.p, self.delta, tuple(invert_pieces(self.annulus)))

    def shrink(self, radius: Dyadic) -> tuple["Germ", list[Piece]]:
        """Same germ on a smaller radius, plus explicit pieces for the part given up."""
        if radius == self.eps:
            return self, []
        if not ZERO < radius < self.eps:
            raise ValueError(f"cannot shrink radius {self.eps} to {radius}")
        ann = self.pieces_on(*self.annulus_arc(radius))
        if self.side > 0:
            rest = self.pieces_on(self.p + radius, self.p + self.eps)
        else:
            rest = self.pieces_on(self.p - self.eps, self.p - radius)
        return replace(self, eps=radius, annulus=tuple(merge_pieces(ann))), rest

    def slopes(self) -> set[int]:
        return {pc.map.log2_slope for pc in self.annulus}


@dataclass(frozen=True, eq=False)
class VAElement:
    pieces: tuple[Piece, ...]
    germs: tuple[Germ, ...] = ()
    _los: list = field(default=None, repr=False, compare=False)
    _text: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_los", [p.lo for p in self.pieces])
        object.__setattr__(self, "_text", [None])

    @classmethod
    def from_plmap(cls, f: PLMap) -> "VAElement":
        return cls(tuple(f.pieces), ())

    def germ_at(self, x: CantorPoint) -> Germ | None:
        for g in self.germs:
            if g.side == x.side and g.p == x.value:
                return g
        return None

    def __call__(self, x: CantorPoint) -> CantorPoint:
        return va_eval(self, x)

    def __mul__(self, other: "VAElement") -> "VAElement":
        return va_compose(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VAElement):
            return NotImplemented
        return self.pieces == other.pieces and self.germs == other.germs

    def __hash__(self) -> int:
        return hash(str(self))

    def __str__(self) -> str:
        if self._text[0] is None:
            self._text[0] = format_va(self)
        return self._text[0]

    def __repr__(self) -> str:
        return f"VAElement({self})"

    def piece_count(self) -> int:
        return len(self.pieces) + sum(len(g.annulus) for g in self.germs)

    def all_pieces(self) -> Iterable[Piece]:
        yield from self.pieces
        for g in self.germs:
            yield from g.annulus

    def log2max(self) -> int:
        """Largest ``|log2 slope|`` over all (infinitely many) linear pieces."""
        return max((abs(p.map.log2_slope) for p in self.all_pieces()), default=0)

    def slopes(self) -> set[int]:
        return {p.map.log2_slope for p in self.all_pieces()}

    def to_plmap(self) -> PLMap:
        if self.germs:
            raise ValueError("element has singularities; it is not in V")
        return PLMap(self.pieces)


IDENTITY = VAElement((Piece(ZERO, ONE, IDENTITY_MAP),))


def format_germ(g: Germ) -> str:
    ann = " ; ".join(format_piece(p) for p in g.annulus)
    side = "+" if g.side > 0 else "-"
    return f"germ(p={g.p}, side={side}, q={g.q}, eps={g.eps}, annulus=[{ann}])"


def format_va(e: VAElement) -> str:
    parts = [format_piece(p) for p in e.pieces] + [format_germ(g) for g in e.germs]
    return "va{ " + " ; ".join(parts) + " }"


# -- validation -----------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    clause: str
    detail: str

    def __str__(self) -> str:
        return f"{self.clause}: {self.detail}"


def _germ_violation(g: Germ) -> Violation | None:
    where = f"germ at {g.p}{'+' if g.side > 0 else '-'}"
    if g.side not in (1, -1):
        return Violation("germ side", f"{where}: side must be + or -")
    if not g.eps > ZERO:
        return Violation("germ radius", f"{where}: eps={g.eps} is not positive")
    lo, hi = g.nbhd()
    if lo < ZERO or hi > ONE:
        return Violation("germ radius", f"{where}: neighbourhood [{lo},{hi}) leaves [0,1]")
    if not g.annulus:
        return Violation("germ annulus", f"{where}: empty annulus")
    a, b = g.annulus_arc()
    cur = a
    for pc in g.annulus:
        if pc.lo != cur or not pc.lo < pc.hi:
            return Violation("germ annulus", f"{where}: annulus pieces do not tile [{a},{b})")
        cur = pc.hi
    if cur != b:
        return Violation("germ annulus", f"{where}: annulus pieces do not tile [{a},{b})")
    for x, y in zip(g.annulus, g.annulus[1:]):
        if x.image_hi != y.image_lo:
            return Violation("germ continuity", f"{where}: annulus jumps at {x.hi}")
    # endpoint compatibility: inner value is the half-contraction of the outer one toward q
    if g.side > 0:
        inner, outer = g.annulus[0].image_lo, g.annulus[-1].image_hi
    else:
        inner, outer = g.annulus[-1].image_hi, g.annulus[0].image_lo
    if (inner - g.q).mul_pow2(1) != outer - g.q:
        return Violation("germ endpoint compatibility", f"{where}: f(inner)={inner}, f(outer)={outer}, q={g.q}")
    if g.side * (outer - g.q).sign() <= 0:
        return Violation("germ side", f"{where}: image lies on the wrong side of q")
    if len(merge_pieces(g.annulus)) == 1:
        return Violation("germ nontrivial", f"{where}: germ is affine, not a singularity")
    # f ∘ L_p = L_q ∘ f on annuli at depths 0..3
    for k in range(1, 4):
        for pc in g.annulus:
            for x in (pc.lo, pc.lo + (pc.hi - pc.lo).mul_pow2(-1)):
                xk = g.p + (x - g.p).mul_pow2(-k)
                pt = CantorPoint(xk, 1)
                lhs = g.eval(CantorPoint(g.p + (xk - g.p).mul_pow2(1), 1))
                rhs_inner = g.eval(pt).value
                if lhs.value != g.q + (rhs_inner - g.q).mul_pow2(1):
                    return Violation("germ self-similarity", f"{where}: fails at depth {k} near {x}")
    return None


def va_validate(e: VAElement) -> Violation | None:
    """``None`` when ``e`` is a valid element, else the first violated clause."""
    for g in e.germs:
        v = _germ_violation(g)
        if v is not None:
            return v
    for pc in e.pieces:
        if not pc.lo < pc.hi:
            return Violation("pieces", f"empty arc [{pc.lo},{pc.hi})")
    dom = [(p.lo, p.hi) for p in e.pieces] + [g.nbhd() for g in e.germs]
    err = check_partition(dom, "domain partition")
    if err:
        return Violation("domain partition", err)
    img = [(p.image_lo, p.image_hi) for p in e.pieces] + [g.image_nbhd() for g in e.germs]
    err = check_partition(img, "image partition")
    if err:
        return Violation("bijectivity", err)
    anchors = [g.anchor for g in e.germs]
    if len(set(anchors)) != len(anchors):
        return Violation("germ anchors", "two germs share an anchor")
    return None


# -- canonical form --------------------------------------------------------

def anchor_caps(anchors: Sequence[CantorPoint]) -> dict[CantorPoint, Dyadic]:
    """Largest admissible radius for each anchor given the others."""
    caps = {}
    for a in anchors:
        p = a.value
        if a.side > 0:
            others = [b for b in anchors if b.value > p]
            if not others:
                caps[a] = ONE - p
                continue
            w = min(b.value for b in others)
            facing = any(b.value == w and b.side < 0 for b in others)
        else:
            others = [b for b in anchors if b.value < p]
            if not others:
                caps[a] = p
                continue
            w = max(b.value for b in others)
            facing = any(b.value == w and b.side > 0 for b in others)
        gap = abs(w - p)
        caps[a] = gap.mul_pow2(-1) if facing else gap
    return caps


def cut(pieces: Sequence[Piece], lo: Dyadic, hi: Dyadic) -> list[Piece]:
    """Pieces with the arc ``[lo, hi)`` removed."""
    out = []
    for p in pieces:
        if p.hi <= lo or p.lo >= hi:
            out.append(p)
            continue
        if p.lo < lo:
            out.append(Piece(p.lo, lo, p.map))
        if p.hi > hi:
            out.append(Piece(hi, p.hi, p.map))
    return out


def _agreement(a: Sequence[Piece], b: Sequence[Piece], lo: Dyadic, hi: Dyadic, outward_up: bool) -> Dyadic:
    """Length of the initial stretch (from the inner end) where two tilings agree."""
    cuts = sorted({lo, hi} | {p.lo for p in a} | {p.hi for p in a} | {p.lo for p in b} | {p.hi for p in b})
    cuts = [c for c in cuts if lo <= c <= hi]
    segs = list(zip(cuts, cuts[1:]))
    if not outward_up:
        segs.reverse()

    def map_at(ps, x0, x1):
        for p in ps:
            if p.lo <= x0 and x1 <= p.hi:
                return p.map
        return None

    agreed = ZERO
    for x0, x1 in segs:
        ma, mb = map_at(a, x0, x1), map_at(b, x0, x1)
        if ma is None or ma != mb:
            break
        agreed = agreed + (x1 - x0)
    return agreed


def _grow(g: Germ, cap: Dyadic, pieces: list[Piece]) -> tuple[Germ, list[Piece]]:
    while g.eps < cap:
        target = min(g.eps.mul_pow2(1), cap)
        if g.side > 0:
            lo, hi = g.p + g.eps, g.p + target
        else:
            lo, hi = g.p - target, g.p - g.eps
        expl = restrict(pieces, lo, hi)
        ext = g.pieces_on(lo, hi)
        gained = _agreement(expl, ext, lo, hi, outward_up=g.side > 0)
        if gained.m == 0:
            break
        new_eps = g.eps + gained
        ann = merge_pieces(g.pieces_on(*g.annulus_arc(new_eps)))
        pieces = cut(pieces, *( (g.p + g.eps, g.p + new_eps) if g.side > 0 else (g.p - new_eps, g.p - g.eps) ))
        g = replace(g, eps=new_eps, annulus=tuple(ann))
        if new_eps < target:
            break
    return g, pieces


def canonicalize(pieces: Iterable[Piece], germs: Iterable[Germ]) -> VAElement:
    pieces = list(pieces)
    gs = []
    for g in germs:
        ann = merge_pieces(g.annulus)
        if len(ann) == 1:
            lo, hi = g.nbhd()
            pieces.append(Piece(lo, hi, ann[0].map))
        else:
            gs.append(replace(g, annulus=tuple(ann)))
    caps = anchor_caps([g.anchor for g in gs])
    for i, g in enumerate(gs):
        cap = caps[g.anchor]
        if g.eps > cap:
            gs[i], rest = g.shrink(cap)
            pieces.extend(rest)
    pieces = merge_pieces(sorted(pieces, key=lambda p: p.lo))
    for i, g in enumerate(gs):
        gs[i], pieces = _grow(g, caps[g.anchor], pieces)
    pieces = merge_pieces(sorted(pieces, key=lambda p: p.lo))
    gs.sort(key=lambda g: g.anchor)
    return VAElement(tuple(pieces), tuple(gs))


def va_canonical(e: VAElement) -> VAElement:
    return canonicalize(e.pieces, e.germs)


def peel(e: VAElement, k: int, anchor: CantorPoint | None = None) -> VAElement:
    """Representation change: move the ``k`` outermost annuli of germs into explicit pieces."""
    pieces = list(e.pieces)
    germs = []
    for g in e.germs:
        if anchor is None or g.anchor == anchor:
            g, rest = g.shrink(g.eps.mul_pow2(-k))
            pieces.extend(rest)
        germs.append(g)
    return VAElement(tuple(merge_pieces(sorted(pieces, key=lambda p: p.lo))), tuple(germs))


# -- evaluation -------------------------------------------------------------

def va_eval(e: VAElement, x: CantorPoint) -> CantorPoint:
    for g in e.germs:
        if g.contains(x):
            return g.eval(x)
    i = find_piece(e.pieces, x, e._los)
    if i < 0:
        raise ValueError(f"{x} not covered by {e}")
    return e.pieces[i].map.apply(x)


def local_piece(e: VAElement, x: CantorPoint) -> Piece:
    """Linear piece of ``e`` containing the non-singular point ``x``."""
    for g in e.germs:
        if g.contains(x):
            if x == g.anchor:
                raise ValueError(f"{x} is a singularity")
            return g.local_piece(x)
    return e.pieces[find_piece(e.pieces, x, e._los)]


def _extent(piece: Piece, x: CantorPoint) -> Dyadic:
    """Room inside ``piece`` from the sided dyadic ``x`` in the direction of its side."""
    return piece.hi - x.value if x.side > 0 else x.value - piece.lo


def raw_inverse(e: VAElement) -> VAElement:
    return VAElement(tuple(invert_pieces(e.pieces)), tuple(g.inverse() for g in e.germs))


def va_preimage(e: VAElement, y: CantorPoint) -> CantorPoint:
    return va_eval(raw_inverse(e), y)


# -- group operations -------------------------------------------------------

def va_compose(f: VAElement, g: VAElement) -> VAElement:
    """``f·g = g ∘ f``, canonical."""
    if not f.germs and not g.germs:
        return canonicalize(compose_pieces(f.pieces, g.pieces), ())
    finv = raw_inverse(f) if g.germs else None
    cands = {gm.anchor for gm in f.germs}
    for gm in g.germs:
        cands.add(va_eval(finv, gm.anchor))
    anchors = sorted(cands)
    caps = anchor_caps(anchors)

    plan = []
    for s in anchors:
        fg = f.germ_at(s)
        t = va_eval(f, s)
        gg = g.germ_at(t)
        if fg is not None:
            r = min(caps[s], fg.eps)
        else:
            fpiece = local_piece(f, s)
            r = min(caps[s], _extent(fpiece, s))
        g_room = gg.eps if gg is not None else _extent(local_piece(g, t), t)
        if fg is not None:
            rho = abs(fg.eval(CantorPoint(s.value + r * s.side, -s.side)).value - t.value)
            while rho > g_room:
                r, rho = r.mul_pow2(-1), rho.mul_pow2(-1)
        else:
            a = fpiece.map.log2_slope
            rho = r.mul_pow2(a)
            if rho > g_room:
                r, rho = g_room.mul_pow2(-a), g_room
        plan.append((s, r, t, rho, fg, gg))

    f_pieces = list(f.pieces)
    g_pieces = list(g.pieces)
    new_germs = []
    f_shrunk = {}
    for s, r, t, rho, fg, gg in plan:
        if fg is not None:
            fg2, rest = fg.shrink(r)
            f_pieces.extend(rest)
            f_shrunk[s] = fg2
    g_shrunk = {}
    for gm in g.germs:
        rho = next(pl[3] for pl in plan if pl[2] == gm.anchor)
        gm2, rest = gm.shrink(rho)
        g_pieces.extend(rest)
        g_shrunk[gm.anchor] = gm2
    f_pieces.sort(key=lambda p: p.lo)
    for s, r, t, rho, fg, gg in plan:
        if fg is None:
            lo, hi = (s.value, s.value + r) if s.side > 0 else (s.value - r, s.value)
            f_pieces = cut(f_pieces, lo, hi)
    g_pieces.sort(key=lambda p: p.lo)
    explicit = compose_pieces(f_pieces, g_pieces)

    for s, r, t, rho, fg, gg in plan:
        if fg is not None:
            f_ann = list(f_shrunk[s].annulus)
            fmap = None
        else:
            fmap = local_piece(f, s).map
            tmp = Germ(s.value, s.side, t.value, r, ())
            f_ann = [Piece(*tmp.annulus_arc(), fmap)]
        if gg is not None:
            g_ann = list(g_shrunk[t].annulus)
            gmap = None
        else:
            gmap = local_piece(g, t).map
            tmp = Germ(t.value, t.side, t.value, rho, ())
            g_ann = [Piece(*tmp.annulus_arc(), gmap)]
        ann = compose_pieces(f_ann, g_ann)
        u = g.germ_at(t).image if gg is not None else gmap.apply(t)
        new_germs.append(Germ(s.value, s.side, u.value, r, tuple(ann)))
    return canonicalize(explicit, new_germs)


def va_invert(e: VAElement) -> VAElement:
    return canonicalize(invert_pieces(e.pieces), [g.inverse() for g in e.germs])


def va_power(e: VAElement, k: int, budget: int = DEFAULT_PIECE_BUDGET) -> VAElement:
    """``e**k`` by square-and-multiply; faults once an intermediate exceeds ``budget`` pieces."""
    if k < 0:
        e, k = va_invert(e), -k
    result = IDENTITY
    base = e
    while k:
        if k & 1:
            result = _checked(va_compose(result, base), budget)
        k >>= 1
        if k:
            base = _checked(va_compose(base, base), budget)
    return result


def _checked(e: VAElement, budget: int) -> VAElement:
    n = e.piece_count()
    if n > budget:
        raise ResourceLimitError(f"element has {n} pieces, over the budget of {budget}")
    return e


def va_powers(e: VAElement, K: int, budget: int = DEFAULT_PIECE_BUDGET) -> list[VAElement]:
    """``[e, e**2, ..., e**K]`` by repeated composition."""
    out = []
    cur = IDENTITY
    for _ in range(K):
        cur = _checked(va_compose(cur, e), budget)
        out.append(cur)
    return out


def va_singularities(e: VAElement) -> tuple[CantorPoint, ...]:
    return tuple(sorted(g.anchor for g in va_canonical(e).germs))


def va_equal(f: VAElement, g: VAElement) -> bool:
    return va_canonical(f) == va_canonical(g)


def is_canonical(e: VAElement) -> bool:
    return va_canonical(e) == e


def from_table(rows) -> list[Piece]:
    from .pl import piece_from_arcs

    return [piece_from_arcs(*(Dyadic.coerce(x) for x in r)) for r in rows]


def image_set(e: VAElement, pts: Iterable[CantorPoint]) -> set[CantorPoint]:
    return {va_eval(e, x) for x in pts}


def preimage_set(e: VAElement, pts: Iterable[CantorPoint]) -> set[CantorPoint]:
    inv = raw_inverse(e)
    return {va_eval(inv, x) for x in pts}


def bisect_points(points: Sequence[CantorPoint], x: CantorPoint) -> int:
    return bisect.bisect_left(points, x)
