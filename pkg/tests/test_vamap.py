import random
from fractions import Fraction

import pytest

from oracle import germ_apply
from support import points, random_element
from vagroup.errors import ResourceLimitError
from vagroup.exact import HALF, ONE, ZERO, CantorPoint, Dyadic
from vagroup.fixtures import BETA_LEFT_GERM, fixtures, get
from vagroup.pl import IDENTITY_MAP, Piece
from vagroup.vamap import (
    IDENTITY,
    Germ,
    VAElement,
    canonicalize,
    is_canonical,
    va_compose,
    va_equal,
    va_eval,
    va_invert,
    va_power,
    va_singularities,
    va_validate,
)


def _frac_table(germ):
    return [(p.lo.to_fraction(), p.hi.to_fraction(), p.image_lo.to_fraction(), p.image_hi.to_fraction()) for p in germ.annulus]


def _near(p: Dyadic, side: int, rng: random.Random) -> CantorPoint:
    depth = rng.randint(2, 30)
    if rng.random() < 0.7:
        off = Dyadic(rng.randrange(1, 1 << 6), -depth - 6)
        return CantorPoint(p + off if side > 0 else p - off, rng.choice([1, -1]))
    q = rng.choice([3, 5, 7]) << depth
    v = p.to_fraction() + side * Fraction(1, q)
    return CantorPoint(v)


@pytest.mark.parametrize("name", ["beta", "beta_l", "beta_r", "contract"])
def test_germs_match_self_similarity_oracle(name):
    e = get(name)
    rng = random.Random(7)
    for g in e.germs:
        table = _frac_table(g)
        for _ in range(200):
            x = _near(g.p, g.side, rng)
            if not g.contains(x) or x == g.anchor:
                continue
            want = germ_apply(g.p.to_fraction(), g.q.to_fraction(), g.side, g.eps.to_fraction(), table, x)
            got = va_eval(e, x)
            assert got.side == x.side
            assert (got.value.to_fraction() if got.side else got.value) == want


def test_beta_anchor_values():
    b = get("beta")
    assert va_eval(b, CantorPoint(ZERO, 1)) == CantorPoint(ZERO, 1)
    assert va_eval(b, CantorPoint(Dyadic(7, -4), 1)) == CantorPoint(Dyadic(3, -3), 1)
    assert va_eval(b, CantorPoint(Dyadic(7, -5), 1)) == CantorPoint(Dyadic(3, -4), 1)
    assert va_singularities(b) == (CantorPoint(ZERO, 1), CantorPoint(ONE, -1))


@pytest.mark.parametrize("name", sorted(fixtures()))
def test_fixtures_are_valid_and_canonical(name):
    e = get(name)
    assert va_validate(e) is None
    assert is_canonical(e)


@pytest.mark.parametrize("seed", range(30))
def test_compose_pointwise(seed):
    rng = random.Random(seed)
    f, g = random_element(rng), random_element(rng)
    fg = va_compose(f, g)
    assert va_validate(fg) is None
    for x in points(seed, 25):
        assert va_eval(fg, x) == va_eval(g, va_eval(f, x))


@pytest.mark.parametrize("seed", range(30))
def test_inverse(seed):
    rng = random.Random(1000 + seed)
    f = random_element(rng)
    fi = va_invert(f)
    assert va_validate(fi) is None
    assert va_compose(f, fi) == IDENTITY
    assert va_compose(fi, f) == IDENTITY
    for x in points(seed, 20):
        assert va_eval(fi, va_eval(f, x)) == x


@pytest.mark.parametrize("seed", range(15))
def test_associativity_structural(seed):
    rng = random.Random(2000 + seed)
    f, g, h = (random_element(rng) for _ in range(3))
    assert va_compose(va_compose(f, g), h) == va_compose(f, va_compose(g, h))


def test_canonical_form_ignores_radius():
    small, rest = BETA_LEFT_GERM.shrink(Dyadic(1, -4))
    raw = canonicalize(rest + [Piece(HALF, ONE, IDENTITY_MAP)], [small])
    assert raw == get("beta_l")
    assert str(raw) == str(get("beta_l"))


def test_identity_has_no_germs():
    b = get("beta")
    assert va_compose(b, va_invert(b)).germs == ()
    assert va_equal(va_power(b, 0), IDENTITY)


def test_power_budget():
    with pytest.raises(ResourceLimitError):
        va_power(get("beta"), 50, budget=20)


def test_power_matches_repeated_product():
    d = get("drift")
    acc = IDENTITY
    for k in range(1, 6):
        acc = va_compose(acc, d)
        assert va_power(d, k) == acc
    assert va_power(d, -3) == va_invert(va_power(d, 3))


def _germ(**kw):
    base = dict(p=ZERO, side=1, q=ZERO, eps=HALF, annulus=BETA_LEFT_GERM.annulus)
    base.update(kw)
    return Germ(**base)


@pytest.mark.parametrize(
    "germ,clause",
    [
        (_germ(eps=ZERO), "germ radius"),
        (_germ(eps=Dyadic(1, -2)), "germ annulus"),
        (_germ(annulus=BETA_LEFT_GERM.annulus[:2]), "germ annulus"),
        (_germ(annulus=(Piece(Dyadic(1, -2), HALF, IDENTITY_MAP),)), "germ nontrivial"),
    ],
)
def test_validation_clauses(germ, clause):
    e = VAElement((Piece(HALF, ONE, IDENTITY_MAP),), (germ,))
    v = va_validate(e)
    assert v is not None and v.clause == clause


def test_validation_rejects_broken_compatibility():
    from vagroup.vamap import from_table

    ann = from_table([
        (Fraction(1, 4), Fraction(3, 8), Fraction(1, 4), Fraction(3, 8)),
        (Fraction(3, 8), Fraction(1, 2), Fraction(3, 8), Fraction(7, 16)),
    ])
    e = VAElement((Piece(HALF, ONE, IDENTITY_MAP),), (_germ(annulus=tuple(ann)),))
    v = va_validate(e)
    assert v is not None and v.clause == "germ endpoint compatibility"
