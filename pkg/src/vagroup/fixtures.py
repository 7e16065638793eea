"""Named elements used throughout the tests, the CLI and the default generating set.

``beta`` is the element of 𝒜 that repeats the x0 pattern self-similarly near 0
and (mirrored) near 1.  ``beta_l`` / ``beta_r`` keep only one of the two ends.
The remaining fixtures are built from these and from elements of V.
"""

from __future__ import annotations

from fractions import Fraction as F
from functools import lru_cache

from .exact import HALF, ONE, ZERO, Dyadic
from .pl import C_GEN, IDENTITY_MAP, PI0, SWAP, X0, X1, Piece, PLMap
from .vamap import Germ, VAElement, canonicalize, from_table, va_compose, va_invert

_LEFT_ANNULUS = from_table([
    (F(1, 4), F(3, 8), F(1, 4), F(5, 16)),
    (F(3, 8), F(7, 16), F(5, 16), F(3, 8)),
    (F(7, 16), F(1, 2), F(3, 8), F(1, 2)),
])
_RIGHT_ANNULUS = from_table([
    (F(1, 2), F(9, 16), F(1, 2), F(5, 8)),
    (F(9, 16), F(5, 8), F(5, 8), F(11, 16)),
    (F(5, 8), F(3, 4), F(11, 16), F(3, 4)),
])

BETA_LEFT_GERM = Germ(ZERO, 1, ZERO, HALF, tuple(_LEFT_ANNULUS))
BETA_RIGHT_GERM = Germ(ONE, -1, ONE, HALF, tuple(_RIGHT_ANNULUS))

# 0+ germ with f(x) < x on the punctured neighbourhood; extremal secant 3/5
_CONTRACT_ANNULUS = from_table([
    (F(1, 4), F(5, 16), F(1, 8), F(3, 16)),
    (F(5, 16), F(3, 8), F(3, 16), F(7, 32)),
    (F(3, 8), F(1, 2), F(7, 32), F(1, 4)),
])

# V element pushing 0+ up through 1/2+, 3/4+, 7/8+, ... towards 1-
DRIFT_V = PLMap.from_table([
    (0, F(1, 2), F(1, 2), F(3, 4)),
    (F(1, 2), F(5, 8), F(3, 4), F(7, 8)),
    (F(5, 8), F(3, 4), 0, F(1, 2)),
    (F(3, 4), 1, F(7, 8), 1),
])


def _va(pl: PLMap) -> VAElement:
    return VAElement.from_plmap(pl)


@lru_cache(maxsize=None)
def fixtures() -> dict[str, VAElement]:
    beta = canonicalize([], [BETA_LEFT_GERM, BETA_RIGHT_GERM])
    beta_l = canonicalize([Piece(HALF, ONE, IDENTITY_MAP)], [BETA_LEFT_GERM])
    beta_r = canonicalize([Piece(ZERO, HALF, IDENTITY_MAP)], [BETA_RIGHT_GERM])
    contract = canonicalize(
        from_table([(F(1, 2), F(3, 4), F(1, 4), F(1, 2)), (F(3, 4), 1, F(1, 2), 1)]),
        [Germ(ZERO, 1, ZERO, HALF, tuple(_CONTRACT_ANNULUS))],
    )
    swap = _va(SWAP)
    drift_v = _va(DRIFT_V)
    # one singularity, infinite orbit: apply drift_v, then beta_l
    drift = va_compose(drift_v, beta_l)
    # two singularities s0 = 5/8+ and s1 = f(s0) = 0+ on one infinite orbit
    planted = va_compose(va_compose(beta_l, drift_v), beta_l)
    # as above plus an untouched fixed singularity at 1-
    planted_multi = va_compose(planted, beta_r)
    # single singularity 0+ on an orbit of period 2
    periodic = va_compose(beta_l, swap)
    # finite order, singular: beta^-1 · swap · beta
    conj_swap = va_compose(va_compose(va_invert(beta), swap), beta)
    return {
        "identity": _va(PLMap((Piece(ZERO, ONE, IDENTITY_MAP),))),
        "x0": _va(X0),
        "x1": _va(X1),
        "C": _va(C_GEN),
        "pi0": _va(PI0),
        "swap": swap,
        "drift_v": drift_v,
        "beta": beta,
        "beta_l": beta_l,
        "beta_r": beta_r,
        "contract": contract,
        "drift": drift,
        "planted": planted,
        "planted_multi": planted_multi,
        "periodic": periodic,
        "conj_swap": conj_swap,
    }


def get(name: str) -> VAElement:
    return fixtures()[name]


def dyadic(x) -> Dyadic:
    return Dyadic.coerce(F(x) if not isinstance(x, Dyadic) else x)
