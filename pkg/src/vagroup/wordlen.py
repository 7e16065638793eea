"""Generating sets and the exact Cayley-ball oracle.

A ball is enumerated breadth-first over canonical forms; the canonical text of
an element is its key, so two words give the same entry exactly when they
are equal as maps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DomainError, ResourceLimitError
from .vamap import DEFAULT_PIECE_BUDGET, IDENTITY, VAElement, va_canonical, va_compose, va_invert, va_validate

log = logging.getLogger(__name__)

BALL_FORMAT = "vagroup-ball v1"
DEFAULT_BALL_LIMIT = 200_000


@dataclass(frozen=True)
class GenSet:
    """Named generators; inverses are adjoined as ``name^-1``."""

    names: tuple[str, ...]
    elements: tuple[VAElement, ...]
    _letters: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if len(self.names) != len(self.elements):
            raise ValueError("names and elements differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator name")
        elems = tuple(va_canonical(e) for e in self.elements)
        for n, e in zip(self.names, elems):
            v = va_validate(e)
            if v is not None:
                raise DomainError(f"generator {n}: {v}")
            if e == IDENTITY:
                raise DomainError(f"generator {n} is the identity")
        object.__setattr__(self, "elements", elems)
        letters = []
        for n, e in zip(self.names, elems):
            letters.append((n, e))
            letters.append((n + "^-1", va_invert(e)))
        object.__setattr__(self, "_letters", letters)

    @classmethod
    def from_dict(cls, gens: dict[str, VAElement]) -> "GenSet":
        return cls(tuple(gens), tuple(gens.values()))

    def letters(self) -> list[tuple[str, VAElement]]:
        return list(self._letters)

    def stats(self) -> list[tuple[str, int, int]]:
        """``(name, max |log2 slope|, |Sing|)`` per generator."""
        return [(n, e.log2max(), len(e.germs)) for n, e in zip(self.names, self.elements)]

    @property
    def max_log2slope(self) -> int:
        return max((e.log2max() for e in self.elements), default=0)

    @property
    def max_sing(self) -> int:
        return max((len(e.germs) for e in self.elements), default=0)


def default_genset() -> GenSet:
    """The four standard generators of V, beta, and beta's 1- end alone.

    This is a stand-in: no finite generating set of the 𝒜 part is claimed.
    """
    from .fixtures import get

    names = ("x0", "x1", "C", "pi0", "beta", "beta_r")
    return GenSet(names, tuple(get(n) for n in names))


@dataclass(frozen=True)
class NotInBall:
    radius: int


@dataclass
class Ball:
    radius: int
    table: dict[str, int]
    generators: tuple[tuple[str, str], ...] = ()

    def __len__(self) -> int:
        return len(self.table)

    def entries(self) -> list[tuple[int, str]]:
        return sorted((n, t) for t, n in self.table.items())

    def dump(self) -> str:
        lines = [f"# {BALL_FORMAT}", f"# radius {self.radius}", f"# size {len(self.table)}"]
        lines += [f"# gen {n} = {t}" for n, t in self.generators]
        lines += [f"{n}\t{t}" for n, t in self.entries()]
        return "\n".join(lines) + "\n"

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dump(), encoding="utf-8")


def bfs_ball(
    S: GenSet,
    radius: int,
    max_elements: int = DEFAULT_BALL_LIMIT,
    budget: int = DEFAULT_PIECE_BUDGET,
) -> Ball:
    if radius < 0:
        raise DomainError("radius must be non-negative")
    letters = S.letters()
    table = {str(IDENTITY): 0}
    frontier = [IDENTITY]
    for r in range(1, radius + 1):
        nxt: dict[str, VAElement] = {}
        for e in frontier:
            for _, s in letters:
                x = va_compose(e, s)
                if x.piece_count() > budget:
                    raise ResourceLimitError(f"element with {x.piece_count()} pieces exceeds budget {budget}")
                t = str(x)
                if t in table or t in nxt:
                    continue
                nxt[t] = x
                if len(table) + len(nxt) > max_elements:
                    raise ResourceLimitError(f"ball exceeds {max_elements} elements at radius {r}")
        for t in nxt:
            table[t] = r
        frontier = [nxt[t] for t in sorted(nxt)]
        log.debug("radius %d: %d new, %d total", r, len(nxt), len(table))
    gens = tuple((n, str(e)) for n, e in zip(S.names, S.elements))
    return Ball(radius, table, gens)


def exact_length(e: VAElement, b: Ball) -> int | NotInBall:
    n = b.table.get(str(va_canonical(e)))
    return NotInBall(b.radius) if n is None else n


def parse_ball(text: str) -> Ball:
    lines = text.splitlines()
    if not lines or lines[0] != f"# {BALL_FORMAT}":
        raise DomainError("not a ball file (bad header)")
    radius = None
    gens = []
    table = {}
    for i, line in enumerate(lines[1:], start=2):
        if line.startswith("# radius "):
            radius = int(line.split()[2])
        elif line.startswith("# gen "):
            name, _, t = line[len("# gen "):].partition(" = ")
            gens.append((name, t))
        elif line.startswith("#") or not line:
            continue
        else:
            n, sep, t = line.partition("\t")
            if not sep:
                raise DomainError(f"ball file line {i}: expected '<length>\\t<element>'")
            table[t] = int(n)
    if radius is None:
        raise DomainError("ball file has no radius line")
    return Ball(radius, table, tuple(gens))


def load_ball(path: str | Path) -> Ball:
    return parse_ball(Path(path).read_text(encoding="utf-8"))
