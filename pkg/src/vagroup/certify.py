"""Word-length lower bounds and infinite-order certificates.

Two quantities bound word length from below by subadditivity: the number of
singularities and the largest ``|log2 slope|``, each divided by its maximum
over the generators.  A certificate says why one of them grows linearly
along the powers of an element.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .dynamics import Periodic, orbit_trace, sing_growth
from .errors import DomainError
from .exact import CantorPoint, Dyadic, floor_log2
from .pl import FixedPoint, pl_fixed_points
from .treepair import HigmanWitness, tp_from_plmap, tp_higman_contraction
from .vamap import DEFAULT_PIECE_BUDGET, Germ, VAElement, local_piece, va_canonical, va_power, va_powers
from .wordlen import GenSet

# denominator of the rational lower bound kept for log2(lambda)
LOG2_DENOM = 64


@dataclass(frozen=True)
class SecantRate:
    """Every point of the punctured neighbourhood moves toward (or away from)
    the anchor by at least the factor ``lam`` per step."""

    lam: Fraction
    anchor: CantorPoint
    attracting: bool

    @property
    def log2_lower(self) -> Fraction:
        return Fraction(floor_log2(self.lam ** LOG2_DENOM), LOG2_DENOM)


@dataclass(frozen=True)
class FixedSegmentSlope:
    log2_slope: int
    fixed_point: CantorPoint


GrowthWitness = SecantRate | FixedSegmentSlope


def _breakpoint_secants(germ: Germ) -> list[tuple[Dyadic, Fraction]]:
    """``(x, (g(x) - p) / (x - p))`` at the breakpoints of the closed annulus."""
    p = germ.p
    xs = [(pc.lo, pc.map(pc.lo)) for pc in germ.annulus]
    last = germ.annulus[-1]
    xs.append((last.hi, last.map(last.hi)))
    return [(x, (y - p).to_fraction() / (x - p).to_fraction()) for x, y in xs]


def _interior_fixed_points(germ: Germ) -> list[FixedPoint]:
    # two levels, so that fixed points on either end of the annulus are seen from both sides
    a, b = germ.annulus_arc()
    if germ.side > 0:
        pieces = germ.pieces_on(germ.p + (a - germ.p).mul_pow2(-1), b)
    else:
        pieces = germ.pieces_on(a, germ.p - (germ.p - b).mul_pow2(-1))
    points, _ = pl_fixed_points(pieces)
    return [fp for fp in points if fp.log2_slope != 0]


def fixed_singularity_rate(g: VAElement, s: CantorPoint) -> GrowthWitness:
    """Growth witness at a singularity ``s`` fixed by ``g``.

    With an interior fixed point in the neighbourhood, a fixed segment of
    non-unit slope is returned (largest ``|log2 slope|``, positive on ties,
    then the smallest point).  Otherwise the extremal breakpoint secant
    through ``(p, p)`` gives the rate.
    """
    g = va_canonical(g)
    germ = g.germ_at(s)
    if germ is None:
        raise DomainError(f"{s} is not a singularity of the element")
    if germ.q != germ.p:
        raise DomainError(f"{s} is not fixed: it maps to {germ.image}")
    fps = _interior_fixed_points(germ)
    if fps:
        best = min(fps, key=lambda fp: (-abs(fp.log2_slope), -fp.log2_slope, fp.point))
        return FixedSegmentSlope(best.log2_slope, best.point)
    secants = [sl for _, sl in _breakpoint_secants(germ)]
    if all(sl < 1 for sl in secants):
        return SecantRate(1 / max(secants), s, True)
    if all(sl > 1 for sl in secants):
        return SecantRate(min(secants), s, False)
    # a sign change of g(x) - x would have produced a fixed point above
    raise AssertionError("secants straddle 1 without a fixed point")


def verify_growth_witness(g: VAElement, w: GrowthWitness) -> bool:
    """Recheck the exact data carried by a witness against ``g``."""
    g = va_canonical(g)
    if isinstance(w, FixedSegmentSlope):
        x = w.fixed_point
        pc = local_piece(g, x)
        return w.log2_slope != 0 and pc.map.log2_slope == w.log2_slope and pc.map.apply(x) == x
    germ = g.germ_at(w.anchor)
    if germ is None or germ.q != germ.p or not w.lam > 1:
        return False
    secants = [sl for _, sl in _breakpoint_secants(germ)]
    if w.attracting:
        return max(secants) == 1 / w.lam
    return min(secants) == w.lam


def growth_check(g: VAElement, w: GrowthWitness, K: int, budget: int = DEFAULT_PIECE_BUDGET) -> list[tuple[int, int, bool]]:
    """Rows ``(k, maxlog2(g**k), holds)`` for ``k = 1..K``.

    ``holds`` is ``2**maxlog2 >= lam**k`` for a secant rate and
    ``maxlog2 >= k |e|`` for a fixed segment of slope ``2**e``.
    """
    rows = []
    for k, p in enumerate(va_powers(g, K, budget), start=1):
        m = p.log2max()
        if isinstance(w, SecantRate):
            ok = Fraction(2) ** m >= w.lam ** k
        else:
            ok = m >= k * abs(w.log2_slope)
        rows.append((k, m, ok))
    return rows


@dataclass(frozen=True)
class LengthLowerBound:
    sing_bound: Fraction
    slope_bound: Fraction

    @property
    def value(self) -> Fraction:
        return max(self.sing_bound, self.slope_bound)


def word_length_lower_bound(f: VAElement, S: GenSet) -> LengthLowerBound:
    f = va_canonical(f)
    ms, ml = S.max_sing, S.max_log2slope
    sing = Fraction(len(f.germs), ms) if ms else Fraction(0)
    slope = Fraction(f.log2max(), ml) if ml else Fraction(0)
    return LengthLowerBound(sing, slope)


@dataclass(frozen=True)
class HigmanLeaf:
    witness: HigmanWitness


@dataclass(frozen=True)
class SingularGrowth:
    """One singularity ``s0`` whose powers gain one singularity per step, checked to ``K``."""

    s0: CantorPoint
    counts: tuple[int, ...]


@dataclass(frozen=True)
class FixedSingularSlope:
    """``s`` has period ``m`` and is a fixed singularity of ``f**m`` with the given witness."""

    s: CantorPoint
    m: int
    witness: GrowthWitness


@dataclass(frozen=True)
class NoCertificate:
    reason: str


@dataclass(frozen=True)
class ViaConjugate:
    """``c^-1·f·c = reduced`` exactly, and ``certificate`` holds for ``reduced``."""

    conjugator: VAElement
    reduced: VAElement
    certificate: "OrderCertificate"


OrderCertificate = HigmanLeaf | SingularGrowth | FixedSingularSlope | ViaConjugate | NoCertificate


def _direct_certificate(f: VAElement, bound: int, n_max: int, growth_K: int, budget: int) -> OrderCertificate:
    if not f.germs:
        w = tp_higman_contraction(tp_from_plmap(f.to_plmap()), n_max)
        if w is None:
            return NoCertificate(f"no contracting leaf in powers up to {n_max}")
        return HigmanLeaf(w)
    sings = [g.anchor for g in f.germs]
    periodic = []
    for s in sings:
        res = orbit_trace(f, s, max_steps=bound)
        if isinstance(res.classification, Periodic):
            periodic.append((s, res.classification.period))
    if len(sings) == 1 and not periodic:
        sg = sing_growth(f, growth_K, budget)
        if sg.set_check and sg.counts == tuple(range(1, growth_K + 1)):
            return SingularGrowth(sings[0], sg.counts)
    for s, m in periodic:
        g = va_power(f, m, budget)
        if g.germ_at(s) is not None:
            return FixedSingularSlope(s, m, fixed_singularity_rate(g, s))
    return NoCertificate(f"no certificate within orbit bound {bound}")


def infinite_order_certificate(
    f: VAElement,
    bound: int = 64,
    n_max: int = 64,
    growth_K: int = 4,
    budget: int = DEFAULT_PIECE_BUDGET,
) -> OrderCertificate:
    """Certificate that ``f`` has infinite order, tried case by case.

    Elements of V use a contracting leaf; a lone singularity on an infinite
    orbit uses singularity growth; a singularity on a finite orbit of length
    ``m`` uses a fixed-singularity rate of ``f**m``.  When none applies and
    several singularities share orbits, the orbit-reduced conjugate is tried.
    """
    f = va_canonical(f)
    cert = _direct_certificate(f, bound, n_max, growth_K, budget)
    if not isinstance(cert, NoCertificate) or len(f.germs) < 2:
        return cert
    from .reduction import reduce_orbits

    rep = reduce_orbits(f, bound)
    if not rep.steps:
        return cert
    inner = _direct_certificate(rep.result, bound, n_max, growth_K, budget)
    if isinstance(inner, NoCertificate):
        return inner
    return ViaConjugate(rep.conjugator, rep.result, inner)


def certificate_constant(cert: OrderCertificate, S: GenSet) -> tuple[Fraction, int]:
    """``(c, period)``: ``lower_bound(f**k) / k >= c`` whenever ``period`` divides ``k``."""
    ml, ms = S.max_log2slope, S.max_sing
    if isinstance(cert, HigmanLeaf):
        w = cert.witness
        return (Fraction(w.depth_gain, w.n * ml) if ml else Fraction(0)), w.n
    if isinstance(cert, SingularGrowth):
        return (Fraction(1, ms) if ms else Fraction(0)), 1
    if isinstance(cert, FixedSingularSlope):
        w = cert.witness
        e = Fraction(abs(w.log2_slope)) if isinstance(w, FixedSegmentSlope) else w.log2_lower
        return (e / (cert.m * ml) if ml else Fraction(0)), cert.m
    if isinstance(cert, ViaConjugate):
        return certificate_constant(cert.certificate, S)
    raise DomainError(f"no certificate: {cert.reason}")


@dataclass(frozen=True)
class Row:
    k: int
    bound: LengthLowerBound

    @property
    def ratio(self) -> Fraction:
        return self.bound.value / self.k


@dataclass(frozen=True)
class DistortionTable:
    certificate: OrderCertificate
    constant: Fraction
    period: int
    rows: tuple[Row, ...]

    def violations(self) -> list[int]:
        return [r.k for r in self.rows if r.k % self.period == 0 and r.ratio < self.constant]

    def to_tsv(self, decimal: bool = False) -> str:
        cols = ["k", "sing_bound", "slope_bound", "lower_bound", "ratio", "checked"]
        if decimal:
            cols.append("ratio_decimal")
        out = [
            f"# certificate\t{describe_certificate(self.certificate)}",
            f"# constant\t{self.constant}\tperiod\t{self.period}",
            "\t".join(cols),
        ]
        for r in self.rows:
            checked = "yes" if r.k % self.period == 0 else "no"
            cells = [str(r.k), str(r.bound.sing_bound), str(r.bound.slope_bound), str(r.bound.value), str(r.ratio), checked]
            if decimal:
                cells.append(to_decimal(r.ratio))
            out.append("\t".join(cells))
        return "\n".join(out) + "\n"


def to_decimal(x: Fraction, digits: int = 6) -> str:
    with localcontext() as ctx:
        ctx.prec = 30
        q = Decimal(x.numerator) / Decimal(x.denominator)
        return str(q.quantize(Decimal(1).scaleb(-digits)))


def distortion_table(
    f: VAElement,
    K: int,
    S: GenSet,
    cert: OrderCertificate | None = None,
    budget: int = DEFAULT_PIECE_BUDGET,
) -> DistortionTable:
    """Rows ``k = 1..K`` of the lower bound on ``ℓ(f**k)`` and its ratio to ``k``.

    A certificate obtained through a conjugate tabulates the reduced element.
    Only ``K > 0`` is tabulated: ``ℓ(f**-k) = ℓ(f**k)`` as the generating set
    is symmetric.
    """
    if K <= 0:
        raise DomainError("K must be positive")
    f = va_canonical(f)
    if cert is None:
        cert = infinite_order_certificate(f, budget=budget)
    if isinstance(cert, NoCertificate):
        raise DomainError(f"element carries no infinite-order certificate ({cert.reason})")
    c, period = certificate_constant(cert, S)
    if isinstance(cert, ViaConjugate):
        # word lengths of conjugates differ by at most 2ℓ(c); the reduced element is tabulated
        f = cert.reduced
    rows = tuple(Row(k, word_length_lower_bound(p, S)) for k, p in enumerate(va_powers(f, K, budget), start=1))
    return DistortionTable(cert, c, period, rows)


def describe_certificate(cert: OrderCertificate) -> str:
    if isinstance(cert, HigmanLeaf):
        w = cert.witness
        return f"HigmanLeaf n={w.n} leaf={w.source_leaf or 'root'} -> {w.target_leaf}"
    if isinstance(cert, SingularGrowth):
        return f"SingularGrowth s0={cert.s0} counts={','.join(map(str, cert.counts))}"
    if isinstance(cert, FixedSingularSlope):
        return f"FixedSingularSlope s={cert.s} m={cert.m} {describe_witness(cert.witness)}"
    if isinstance(cert, ViaConjugate):
        return f"ViaConjugate {describe_certificate(cert.certificate)} (reduced element tabulated)"
    return f"None ({cert.reason})"


def describe_witness(w: GrowthWitness) -> str:
    if isinstance(w, SecantRate):
        kind = "attracting" if w.attracting else "repelling"
        return f"SecantRate lambda={w.lam} at {w.anchor} ({kind})"
    return f"FixedSegmentSlope log2_slope={w.log2_slope} at {w.fixed_point}"
