import pytest

from vagroup.errors import DomainError, ResourceLimitError
from vagroup.fixtures import get
from vagroup.vamap import IDENTITY, va_compose
from vagroup.wordlen import GenSet, NotInBall, bfs_ball, default_genset, exact_length, parse_ball


@pytest.fixture(scope="module")
def ball2():
    return bfs_ball(default_genset(), 2)


def test_default_genset_stats():
    S = default_genset()
    for name, slope, sing in S.stats():
        assert sing <= 2
        assert slope <= 2
    assert IDENTITY not in S.elements


def test_identity_rejected():
    with pytest.raises(DomainError):
        GenSet(("one",), (IDENTITY,))


def test_radius_zero_and_one():
    S = default_genset()
    assert bfs_ball(S, 0).table == {str(IDENTITY): 0}
    b1 = bfs_ball(S, 1)
    assert len(b1) <= 1 + 2 * len(S.names)
    assert sorted(set(b1.table.values())) == [0, 1]


def test_growth_bound(ball2):
    S = default_genset()
    b1 = bfs_ball(S, 1)
    assert len(ball2) <= (2 * len(S.names)) ** 2 + len(b1)


def test_lengths(ball2):
    assert exact_length(IDENTITY, ball2) == 0
    for e in default_genset().elements:
        assert exact_length(e, ball2) == 1
    x0 = get("x0")
    assert exact_length(va_compose(x0, x0), ball2) == 2
    assert exact_length(va_compose(va_compose(x0, x0), x0), ball2) == NotInBall(2)


def test_neighbours_differ_by_at_most_one(ball2):
    from vagroup.dsl import parse_va

    letters = default_genset().letters()
    for text, n in ball2.table.items():
        if n == 2:
            continue
        e = parse_va(text)
        for _, s in letters:
            m = exact_length(va_compose(e, s), ball2)
            assert m in (n - 1, n, n + 1)


def test_persistence_roundtrip(ball2):
    text = ball2.dump()
    assert text.splitlines()[0] == "# vagroup-ball v1"
    again = parse_ball(text)
    assert again.table == ball2.table
    assert again.dump() == text


def test_ball_limit():
    with pytest.raises(ResourceLimitError):
        bfs_ball(default_genset(), 2, max_elements=20)


def test_bad_ball_file():
    with pytest.raises(DomainError):
        parse_ball("nonsense\n")


def test_power_length_subadditive(ball2):
    from vagroup.dsl import parse_va
    from vagroup.vamap import va_power

    for text, n in ball2.table.items():
        if n == 0:
            continue
        e = parse_va(text)
        for m in (2, 3):
            lm = exact_length(va_power(e, m), ball2)
            if not isinstance(lm, NotInBall):
                assert lm <= m * n
