import pytest

from vagroup.dynamics import sing_orbit_partition
from vagroup.errors import DomainError
from vagroup.exact import ONE, ZERO, CantorPoint, Dyadic
from vagroup.fixtures import get
from vagroup.pl import SWAP
from vagroup.reduction import (
    IntoV,
    NotFiniteOrder,
    check_report,
    conjugate_into_v,
    detach_singularity,
    dyadic_interpolate,
    reduce_orbits,
    verify_labelling,
)
from vagroup.treepair import Finite, tp_from_plmap, tp_order
from vagroup.vamap import va_compose, va_equal, va_invert, va_singularities, va_validate

Z, O = CantorPoint(ZERO, 1), CantorPoint(ONE, -1)
S0 = CantorPoint(Dyadic(5, -3), 1)


@pytest.mark.parametrize(
    "src,dst",
    [((0, 1), (0, 1)), ((Dyadic(1, -2), Dyadic(1)), (Dyadic(0), Dyadic(1, -3))), ((Dyadic(3, -4), Dyadic(5, -3)), (Dyadic(1, -1), Dyadic(1)))],
)
def test_interpolation_is_a_bijection(src, dst):
    src = tuple(Dyadic.coerce(x) for x in src)
    dst = tuple(Dyadic.coerce(x) for x in dst)
    pieces = dyadic_interpolate(src, dst)
    assert pieces[0].lo == src[0] and pieces[-1].hi == src[1]
    assert pieces[0].image_lo == dst[0] and pieces[-1].image_hi == dst[1]
    for a, b in zip(pieces, pieces[1:]):
        assert a.hi == b.lo and a.image_hi == b.image_lo


def test_labelling_checked():
    f = get("planted")
    verify_labelling(f, ((S0, 0), (Z, 1)))
    with pytest.raises(DomainError):
        verify_labelling(f, ((S0, 0), (Z, 2)))
    with pytest.raises(DomainError):
        verify_labelling(f, ((Z, 1),))


def test_detach_removes_last_singularity():
    f = get("planted")
    d = detach_singularity(f, ((S0, 0), (Z, 1)))
    assert va_validate(d.f_prime) is None
    assert Z not in va_singularities(d.f_prime)
    assert Z not in va_singularities(d.f_conj)
    assert va_equal(va_compose(va_compose(va_invert(d.a), f), d.a), d.f_conj)
    # f' agrees with f off U
    assert va_singularities(d.f_prime) == (S0,)


@pytest.mark.parametrize("name", ["planted", "planted_multi", "conj_swap"])
def test_reduce_orbits(name):
    f = get(name)
    rep = reduce_orbits(f)
    assert check_report(f, rep)
    part = sing_orbit_partition(rep.result)
    assert all(len(c) <= 1 for c in part.classes)


def test_untouched_orbit_is_unchanged():
    f = get("planted_multi")
    rep = reduce_orbits(f)
    assert rep.result.germ_at(O) == f.germ_at(O)
    assert rep.partial


def test_nothing_to_do():
    rep = reduce_orbits(get("beta"))
    assert rep.steps == ()
    assert rep.result == get("beta")


def test_into_v_for_conjugated_swap():
    res = conjugate_into_v(get("conj_swap"))
    assert isinstance(res, IntoV)
    assert res.v.germs == ()
    assert tp_order(tp_from_plmap(res.v.to_plmap())) == Finite(2)
    c = res.conjugator
    assert va_equal(va_compose(va_compose(va_invert(c), get("conj_swap")), c), res.v)


def test_into_v_for_beta_fails_with_certificate():
    from vagroup.certify import FixedSingularSlope

    res = conjugate_into_v(get("beta"))
    assert isinstance(res, NotFiniteOrder)
    assert isinstance(res.certificate, FixedSingularSlope)


def test_into_v_on_v_element_is_trivial():
    res = conjugate_into_v(get("swap"))
    assert isinstance(res, IntoV) and res.v == get("swap")
