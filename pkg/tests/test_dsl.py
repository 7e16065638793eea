from importlib import resources

import pytest

from vagroup.dsl import format_named, parse_element, parse_named, parse_va
from vagroup.errors import ParseError
from vagroup.fixtures import fixtures, get
from vagroup.pl import X0, PLMap
from vagroup.treepair import TreePair, tp_from_plmap
from vagroup.vamap import VAElement, va_validate


@pytest.mark.parametrize("name", sorted(fixtures()))
def test_print_parse_roundtrip(name):
    e = get(name)
    assert str(parse_element(str(e))) == str(e)


def test_other_forms():
    assert parse_element(str(X0)) == X0
    tp = tp_from_plmap(X0)
    assert parse_element(str(tp)) == tp
    assert isinstance(parse_element(str(X0)), PLMap)
    assert isinstance(parse_element(str(tp)), TreePair)
    assert parse_va(str(tp)) == get("x0")


def test_accepts_plain_denominators_and_newlines():
    e = parse_element("va{\n  [0,1/2) -> [1/2,1) ;\n  [1/2,1) -> [0,1/2)\n}")
    assert isinstance(e, VAElement) and e == get("swap")


def test_shipped_fixture_file():
    text = resources.files("vagroup").joinpath("data/fixtures.va").read_text()
    named = parse_named(text)
    assert set(named) == set(fixtures())
    for n, e in named.items():
        assert va_validate(e) is None
        assert e == get(n)


def test_named_roundtrip():
    assert parse_named(format_named(fixtures())).keys() == fixtures().keys()


@pytest.mark.parametrize(
    "text,line,col,fragment",
    [
        ("va{ [0,1) ", 1, 11, "expected ->"),
        ("va{ [0,1/3) -> [0,1) }", 1, 8, "not a dyadic"),
        ("vb{ }", 1, 1, "expected va"),
        ("va{ [0,1) -> [0,1) }\n extra", 2, 2, "trailing"),
        ("va{ [0,1) -> [0,1) } %", 1, 22, "unexpected character"),
    ],
)
def test_syntax_errors_have_positions(text, line, col, fragment):
    with pytest.raises(ParseError) as info:
        parse_element(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert fragment in str(info.value)


def test_validation_error_names_clause():
    bad = "va{ [1/2,1) -> [1/2,1) ; germ(p=0, side=+, q=0, eps=0, annulus=[[0,1) -> [0,1)]) }"
    with pytest.raises(ParseError) as info:
        parse_element(bad)
    assert "germ radius" in str(info.value)


def test_pl_rejects_germs():
    with pytest.raises(ParseError):
        parse_element("pl{ germ(p=0, side=+, q=0, eps=1, annulus=[[0,1) -> [0,1)]) }")


def test_named_error_position():
    with pytest.raises(ParseError) as info:
        parse_named("a = va{ [0,1) -> [0,1) }\nb = va{ [0,1) [0,1) }")
    assert info.value.line == 2
