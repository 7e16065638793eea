"""Tree-pair diagrams for V, Higman's contracting-leaf search and order detection.

A binary tree is stored as the left-to-right tuple of its leaf addresses;
an address is the binary string of the path from the root, so the leaf
``"01"`` is the standard dyadic arc ``[1/4, 1/2)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .exact import Dyadic
from .pl import AffineMap, PLMap, Piece


def arc_of(addr: str) -> tuple[Dyadic, Dyadic]:
    n = len(addr)
    k = int(addr, 2) if addr else 0
    return Dyadic(k, -n), Dyadic(k + 1, -n)


def addr_of(lo: Dyadic, hi: Dyadic) -> str:
    """Address of the standard dyadic arc ``[lo, hi)``; raises if not standard."""
    length = hi - lo
    if length.m != 1 or length.e > 0:
        raise ValueError(f"[{lo},{hi}) is not a standard dyadic arc")
    n = -length.e
    k = lo.mul_pow2(n)
    if k.e < 0:
        raise ValueError(f"[{lo},{hi}) is not a standard dyadic arc")
    k_int = k.m << k.e
    return format(k_int, f"0{n}b") if n else ""


def standard_cover(lo: Dyadic, hi: Dyadic) -> list[tuple[Dyadic, Dyadic]]:
    """Greedy split of ``[lo, hi)`` into maximal aligned standard dyadic arcs."""
    out = []
    cur = lo
    while cur < hi:
        # largest 2**-n dividing cur and fitting before hi
        if cur.m == 0:
            size = Dyadic(1)
        else:
            size = Dyadic(1, cur.e)
        while cur + size > hi:
            size = size.mul_pow2(-1)
        out.append((cur, cur + size))
        cur = cur + size
    return out


def tree_text(leaves: Sequence[str]) -> str:
    """Balanced-paren form: a leaf is empty, a caret is ``(left,right)``."""
    pos = 0
    depth = max((len(x) for x in leaves), default=0)

    def build(prefix: str) -> str:
        nonlocal pos
        if pos < len(leaves) and leaves[pos] == prefix:
            pos += 1
            return ""
        if len(prefix) >= depth:
            raise ValueError("leaves do not form a tree")
        return f"({build(prefix + '0')},{build(prefix + '1')})"

    out = build("")
    if pos != len(leaves):
        raise ValueError("leaves do not form a tree")
    return out


def parse_tree(text: str) -> tuple[str, ...]:
    leaves: list[str] = []
    pos = 0
    text = text.replace(" ", "")

    def node(prefix: str):
        nonlocal pos
        if pos < len(text) and text[pos] == "(":
            pos += 1
            node(prefix + "0")
            if pos >= len(text) or text[pos] != ",":
                raise ValueError(f"expected ',' at {pos} in tree {text!r}")
            pos += 1
            node(prefix + "1")
            if pos >= len(text) or text[pos] != ")":
                raise ValueError(f"expected ')' at {pos} in tree {text!r}")
            pos += 1
        else:
            leaves.append(prefix)

    node("")
    if pos != len(text):
        raise ValueError(f"trailing text in tree {text!r}")
    return tuple(leaves)


def is_tree(leaves: Sequence[str]) -> bool:
    try:
        tree_text(leaves)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class TreePair:
    """``(S, T, perm)``: source leaf ``i`` goes to target leaf ``perm[i]``."""

    source: tuple[str, ...]
    target: tuple[str, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        if not (len(self.source) == len(self.target) == len(self.perm)):
            raise ValueError("tree pair with mismatched leaf counts")
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm is not a permutation")
        if not (is_tree(self.source) and is_tree(self.target)):
            raise ValueError("leaves do not form binary trees")

    def pairs(self) -> list[tuple[str, str]]:
        return [(s, self.target[j]) for s, j in zip(self.source, self.perm)]

    @property
    def is_trivial(self) -> bool:
        return len(self.source) == 1

    def __str__(self) -> str:
        perm = " ".join(str(j + 1) for j in self.perm)
        return f"tp{{{tree_text(self.source)}; {tree_text(self.target)}; {perm}}}"


TRIVIAL = TreePair(("",), ("",), (0,))


def from_pairs(pairs: Sequence[tuple[str, str]]) -> TreePair:
    src = sorted(pairs, key=lambda st: arc_of(st[0])[0])
    targets = sorted((t for _, t in src), key=lambda t: arc_of(t)[0])
    index = {t: i for i, t in enumerate(targets)}
    return TreePair(tuple(s for s, _ in src), tuple(targets), tuple(index[t] for _, t in src))


def _carets(tp: TreePair) -> list[int]:
    out = []
    src, tgt, perm = tp.source, tp.target, tp.perm
    for i in range(len(src) - 1):
        a, b = src[i], src[i + 1]
        if not (a and a[-1] == "0" and b == a[:-1] + "1"):
            continue
        j = perm[i]
        if perm[i + 1] != j + 1:
            continue
        c, d = tgt[j], tgt[j + 1]
        if c and c[-1] == "0" and d == c[:-1] + "1":
            out.append(i)
    return out


def reduce_pair(tp: TreePair, rng: random.Random | None = None) -> TreePair:
    """Remove matching carets until none remain; ``rng`` picks the order."""
    while True:
        cands = _carets(tp)
        if not cands:
            return tp
        i = rng.choice(cands) if rng is not None else cands[0]
        pairs = tp.pairs()
        s, t = pairs[i]
        pairs[i:i + 2] = [(s[:-1], t[:-1])]
        tp = from_pairs(pairs)


def tp_from_plmap(f: PLMap) -> TreePair:
    pairs = []
    for piece in f.pieces:
        stack = list(reversed(standard_cover(piece.lo, piece.hi)))
        while stack:
            lo, hi = stack.pop()
            try:
                t = addr_of(piece.map(lo), piece.map(hi))
            except ValueError:
                mid = lo + (hi - lo).mul_pow2(-1)
                stack.append((mid, hi))
                stack.append((lo, mid))
                continue
            pairs.append((addr_of(lo, hi), t))
    return reduce_pair(from_pairs(pairs))


def tp_to_plmap(tp: TreePair) -> PLMap:
    pieces = []
    for s, t in tp.pairs():
        lo, hi = arc_of(s)
        c, _ = arc_of(t)
        e = len(s) - len(t)
        pieces.append(Piece(lo, hi, AffineMap(e, c - lo.mul_pow2(e))))
    return PLMap(tuple(pieces))


def tp_invert(tp: TreePair) -> TreePair:
    inv = [0] * len(tp.perm)
    for i, j in enumerate(tp.perm):
        inv[j] = i
    return TreePair(tp.target, tp.source, tuple(inv))


def _common_leaves(a: Sequence[str], b: Sequence[str]) -> list[str]:
    """Leaves of the smallest common expansion of two trees."""
    out = []
    for x in a:
        longer = [y for y in b if y.startswith(x)]
        if longer:
            out.extend(longer)
        else:
            out.append(x)
    return out


def tp_multiply(a: TreePair, b: TreePair, *, reduce: bool = True) -> TreePair:
    """``a·b``: apply ``a`` first, then ``b``."""
    a_src = {t: s for s, t in a.pairs()}
    b_tgt = dict(b.pairs())
    pairs = []
    for z in _common_leaves(a.target, b.source):
        ta = next(t for t in a.target if z.startswith(t))
        sb = next(s for s in b.source if z.startswith(s))
        pairs.append((a_src[ta] + z[len(ta):], b_tgt[sb] + z[len(sb):]))
    out = from_pairs(pairs)
    return reduce_pair(out) if reduce else out


def tp_power(tp: TreePair, n: int) -> TreePair:
    if n < 0:
        tp, n = tp_invert(tp), -n
    out = TRIVIAL
    for _ in range(n):
        out = tp_multiply(out, tp)
    return out


@dataclass(frozen=True)
class HigmanWitness:
    """In the reduced diagram of ``f**n``, ``source_leaf`` is paired with ``target_leaf``,
    a proper descendant of it."""

    n: int
    source_leaf: str
    target_leaf: str

    @property
    def depth_gain(self) -> int:
        return len(self.target_leaf) - len(self.source_leaf)


def _contraction(tp: TreePair) -> tuple[str, str] | None:
    for s, t in tp.pairs():
        if len(t) > len(s) and t.startswith(s):
            return s, t
    return None


def verify_witness(f: TreePair, w: HigmanWitness) -> bool:
    p = tp_power(f, w.n)
    return (w.source_leaf, w.target_leaf) in p.pairs() and w.depth_gain > 0 and w.target_leaf.startswith(w.source_leaf)


def tp_higman_contraction(f: TreePair, n_max: int = 64) -> HigmanWitness | None:
    """First ``n <= n_max`` whose reduced diagram has a leaf paired with a proper descendant."""
    p = TRIVIAL
    for n in range(1, n_max + 1):
        p = tp_multiply(p, f)
        hit = _contraction(p)
        if hit is not None:
            return HigmanWitness(n, *hit)
    return None


@dataclass(frozen=True)
class Finite:
    order: int


@dataclass(frozen=True)
class InfiniteCertified:
    witness: HigmanWitness


@dataclass(frozen=True)
class Unknown:
    n_max: int


def tp_order(f: TreePair, n_max: int = 64) -> Finite | InfiniteCertified | Unknown:
    p = TRIVIAL
    for n in range(1, n_max + 1):
        p = tp_multiply(p, f)
        if p.is_trivial:
            return Finite(n)
        hit = _contraction(p)
        if hit is not None:
            return InfiniteCertified(HigmanWitness(n, *hit))
    return Unknown(n_max)


def parse_treepair(text: str) -> TreePair:
    t = text.strip()
    if not (t.startswith("tp{") and t.endswith("}")):
        raise ValueError(f"tree pair must look like tp{{S; T; perm}}: {text!r}")
    parts = t[3:-1].split(";")
    if len(parts) != 3:
        raise ValueError(f"tree pair needs three ';'-separated fields: {text!r}")
    src, tgt = parse_tree(parts[0].strip()), parse_tree(parts[1].strip())
    perm = tuple(int(x) - 1 for x in parts[2].split())
    return TreePair(src, tgt, perm)
