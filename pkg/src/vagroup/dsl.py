"""Text syntax for elements, shared by the CLI, the fixtures file and ball files.

::

    pl{ [0,1/2^1) -> [0,1/2^2) ; [1/2^1,3/2^2) -> [1/2^2,1/2^1) ; [3/2^2,1) -> [1/2^1,1) }
    va{ [1/2^1,1) -> [1/2^1,1) ; germ(p=0, side=+, q=0, eps=1/2^1, annulus=[...]) }
    tp{((,),); (,(,)); 1 2 3}

Numbers are ``m/2^k``, ``m/d`` with ``d`` a power of two, or integers.  The
printers in ``pl``, ``vamap`` and ``treepair`` produce exactly this syntax, so
printing a parsed canonical element gives back the input.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import ParseError
from .exact import Dyadic, parse_dyadic
from .pl import PLMap, Piece, piece_from_arcs
from .treepair import TreePair, parse_treepair
from .vamap import Germ, VAElement, canonicalize, va_validate

_NUM = r"-?\d+(?:\s*/\s*\d+(?:\s*\^\s*\d+)?)?"
_TOKEN = re.compile(rf"\s*(?:(?P<num>{_NUM})|(?P<word>[A-Za-z_]+)|(?P<arrow>->)|(?P<sym>[\[\](){{}};,=+\-]))")


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character {text[pos]!r}", *_line_col(text, pos))
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def error(self, msg: str) -> ParseError:
        pos = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        return ParseError(msg, *_line_col(self.text, pos))

    def peek(self) -> str | None:
        return self.toks[self.i][1] if self.i < len(self.toks) else None

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        if self.i >= len(self.toks):
            raise self.error(f"expected {value or kind}, found end of input")
        k, v, _ = self.toks[self.i]
        if (value is not None and v != value) or (kind is not None and k != kind):
            raise self.error(f"expected {value or kind}, found {v!r}")
        self.i += 1
        return v

    def number(self) -> Dyadic:
        tok = self.take(kind="num")
        try:
            return parse_dyadic(tok)
        except ValueError:
            self.i -= 1
            raise self.error(f"{tok!r} is not a dyadic rational") from None

    def piece(self) -> Piece:
        start = self.i
        self.take("[")
        lo = self.number()
        self.take(",")
        hi = self.number()
        self.take(")")
        self.take("->")
        self.take("[")
        c = self.number()
        self.take(",")
        d = self.number()
        self.take(")")
        try:
            return piece_from_arcs(lo, hi, c, d)
        except ValueError as exc:
            self.i = start
            raise self.error(f"pieces: {exc}") from None

    def germ(self) -> Germ:
        self.take("germ")
        self.take("(")
        fields: dict[str, object] = {}
        for name in ("p", "side", "q", "eps"):
            self.take(name)
            self.take("=")
            if name == "side":
                sign = self.take(kind="sym")
                if sign not in "+-":
                    self.i -= 1
                    raise self.error("side must be + or -")
                fields[name] = 1 if sign == "+" else -1
            else:
                fields[name] = self.number()
            self.take(",")
        self.take("annulus")
        self.take("=")
        self.take("[")
        ann = [self.piece()]
        while self.peek() == ";":
            self.take(";")
            ann.append(self.piece())
        self.take("]")
        self.take(")")
        return Germ(fields["p"], fields["side"], fields["q"], fields["eps"], tuple(ann))

    def body(self, allow_germs: bool) -> tuple[list[Piece], list[Germ]]:
        pieces: list[Piece] = []
        germs: list[Germ] = []
        while True:
            if self.peek() == "germ":
                if not allow_germs:
                    raise self.error("germs are not allowed in pl{...}")
                germs.append(self.germ())
            else:
                pieces.append(self.piece())
            if self.peek() == ";":
                self.take(";")
                continue
            return pieces, germs

    def end(self) -> None:
        if self.i != len(self.toks):
            raise self.error(f"trailing input {self.toks[self.i][1]!r}")


def parse_element(text: str) -> VAElement | PLMap | TreePair:
    """Parse one ``va{...}``, ``pl{...}`` or ``tp{...}`` form.

    ``va`` forms are validated, then canonicalized.
    """
    stripped = text.strip()
    if stripped.startswith("tp{"):
        try:
            return parse_treepair(stripped)
        except ValueError as exc:
            raise ParseError(str(exc), *_line_col(text, text.index("tp{"))) from None
    p = _Parser(text)
    head = p.take(kind="word")
    if head not in ("va", "pl"):
        p.i -= 1
        raise p.error(f"expected va{{...}}, pl{{...}} or tp{{...}}, found {head!r}")
    p.take("{")
    pieces, germs = p.body(head == "va")
    p.take("}")
    p.end()
    if head == "pl":
        try:
            return PLMap(tuple(pieces))
        except ValueError as exc:
            raise ParseError(f"bijectivity: {exc}", 1, 1) from None
    raw = VAElement(tuple(sorted(pieces, key=lambda pc: pc.lo)), tuple(germs))
    v = va_validate(raw)
    if v is not None:
        raise ParseError(f"validation failed, {v}", *_line_col(text, 0))
    return canonicalize(raw.pieces, raw.germs)


def as_va(x: VAElement | PLMap | TreePair) -> VAElement:
    from .treepair import tp_to_plmap

    if isinstance(x, TreePair):
        x = tp_to_plmap(x)
    if isinstance(x, PLMap):
        return VAElement.from_plmap(x)
    return x


def parse_va(text: str) -> VAElement:
    return as_va(parse_element(text))


def parse_named(text: str) -> dict[str, VAElement]:
    """``name = <element>`` lines; ``#`` starts a comment line."""
    out: dict[str, VAElement] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        name, eq, rest = s.partition("=")
        name = name.strip()
        if not eq or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError("expected 'name = element'", n, 1)
        try:
            out[name] = parse_va(rest)
        except ParseError as exc:
            offset = line.index("=") + 1 + (len(rest) - len(rest.lstrip()))
            raise ParseError(str(exc).split(": ", 1)[1], n, exc.column + offset) from None
    return out


def load_named(path: str | Path) -> dict[str, VAElement]:
    return parse_named(Path(path).read_text(encoding="utf-8"))


def format_named(elements: dict[str, VAElement]) -> str:
    return "".join(f"{n} = {e}\n" for n, e in elements.items())
