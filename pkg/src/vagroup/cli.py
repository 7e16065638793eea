"""Command-line entry point: ``vagroup <subcommand> ...``.

Elements are given with ``--element`` as a fixture name (see ``vagroup
fixtures``), a path to a file holding one element, or inline text.  Exit
status is 0 on success, 1 on domain errors (bad input, unmet precondition)
and 2 when a resource budget is exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import certify, dynamics, reduction, treepair, wordlen
from .dsl import load_named, parse_element, parse_va
from .errors import DomainError, ResourceLimitError
from .exact import parse_point
from .fixtures import fixtures
from .vamap import DEFAULT_PIECE_BUDGET, IDENTITY, VAElement, va_compose, va_invert, va_power, va_singularities

log = logging.getLogger("vagroup")

DISTORTION_HELP = """\
TSV columns of `distortion`:
  k            exponent
  sing_bound   |Sing(f^k)| / max generator |Sing|
  slope_bound  max |log2 slope| of f^k / max generator |log2 slope|
  lower_bound  max of the two; a lower bound for the word length of f^k
  ratio        lower_bound / k
  checked      yes when k is a multiple of the certificate period, where
               ratio >= constant is guaranteed
  ratio_decimal  (with --decimal) display-only decimal form of ratio
Only k > 0 is tabulated: the generating set is symmetric, so f^-k and f^k
have the same word length.
"""


@dataclass
class Config:
    genset: str | None = None
    max_steps: int = dynamics.MAX_STEPS
    max_bits: int = dynamics.MAX_BITS
    budget: int = DEFAULT_PIECE_BUDGET
    n_max: int = 64
    bound: int = 64
    ball_limit: int = wordlen.DEFAULT_BALL_LIMIT
    format: str = "tsv"

    @classmethod
    def load(cls, path: str | None) -> "Config":
        if path is None:
            return cls()
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read config {path}: {exc}") from None
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        if cfg.genset is not None:
            # relative genset paths are taken from the config file's directory
            gp = Path(cfg.genset)
            if not gp.is_absolute():
                cfg.genset = str(Path(path).parent / gp)
        for name in ("max_steps", "max_bits", "budget", "n_max", "bound", "ball_limit"):
            if getattr(cfg, name) <= 0:
                raise DomainError(f"config {name} must be positive")
        if cfg.format not in ("text", "tsv"):
            raise DomainError("config format must be 'text' or 'tsv'")
        return cfg

    def genset_obj(self) -> wordlen.GenSet:
        if self.genset is None:
            return wordlen.default_genset()
        return wordlen.GenSet.from_dict(load_named(self.genset))


def resolve_element(source: str):
    fx = fixtures()
    if source in fx:
        return fx[source]
    p = Path(source)
    if "{" not in source and p.is_file():
        source = p.read_text(encoding="utf-8")
    return parse_element(source)


def resolve_va(source: str) -> VAElement:
    from .dsl import as_va

    return as_va(resolve_element(source))


def _one(args) -> VAElement:
    if not args.element:
        raise DomainError("--element is required")
    if len(args.element) != 1:
        raise DomainError("exactly one --element is expected")
    return resolve_va(args.element[0])


def _fmt_set(pts) -> str:
    return "{" + ", ".join(str(p) for p in pts) + "}"


def cmd_compose(args, cfg, out):
    if not args.element or len(args.element) < 2:
        raise DomainError("compose needs at least two --element options")
    els = [resolve_va(s) for s in args.element]
    acc = els[0]
    for e in els[1:]:
        acc = va_compose(acc, e)
    print(acc, file=out)


def cmd_inv(args, cfg, out):
    print(va_invert(_one(args)), file=out)


def cmd_pow(args, cfg, out):
    print(va_power(_one(args), args.k, cfg.budget), file=out)


def cmd_eval(args, cfg, out):
    e = _one(args)
    print(e(_point(args.point)), file=out)


def _point(text):
    if text is None:
        raise DomainError("--point is required")
    try:
        return parse_point(text)
    except ValueError as exc:
        raise DomainError(str(exc)) from None


def cmd_sing(args, cfg, out):
    print(_fmt_set(va_singularities(_one(args))), file=out)


def cmd_orbit(args, cfg, out):
    e = _one(args)
    res = dynamics.orbit_trace(e, _point(args.point), cfg.max_steps, cfg.max_bits)
    c = res.classification
    if isinstance(c, dynamics.Periodic):
        print(f"periodic\tpreperiod {c.preperiod}\tperiod {c.period}", file=out)
    else:
        print(f"unresolved\tafter {c.steps} steps ({c.reason} bound)", file=out)
    shown = res.trace if args.full else res.trace[:20]
    for i, x in enumerate(shown):
        print(f"{i}\t{x}", file=out)
    if len(shown) < len(res.trace):
        print(f"# {len(res.trace) - len(shown)} more points; pass --full", file=out)


def cmd_orbits(args, cfg, out):
    part = dynamics.sing_orbit_partition(_one(args), cfg.bound, cfg.max_bits)
    for i, line in enumerate(reduction.partition_summary(part)):
        print(f"orbit {i}\t{line}", file=out)
    for s, t in part.unresolved_pairs:
        print(f"unresolved\t{s}\t{t}", file=out)


def cmd_reduce(args, cfg, out):
    rep = reduction.reduce_orbits(_one(args), cfg.bound)
    print(f"conjugator\t{rep.conjugator}", file=out)
    print(f"result\t{rep.result}", file=out)
    for st in rep.steps:
        print(f"step\torbit {st.orbit}\tremoved {st.removed}\tprevious {st.prev_status}", file=out)
    if rep.partial:
        print("partial\t" + " ".join(f"{s}~{t}" for s, t in rep.unresolved_pairs), file=out)


def cmd_into_v(args, cfg, out):
    res = reduction.conjugate_into_v(_one(args), cfg.bound, cfg.n_max)
    if isinstance(res, reduction.IntoV):
        print(f"conjugator\t{res.conjugator}", file=out)
        print(f"v\t{res.v}", file=out)
    elif isinstance(res, reduction.NotFiniteOrder):
        print(f"not-finite-order\t{certify.describe_certificate(res.certificate)}", file=out)
    else:
        print(f"unknown\t{res.reason}", file=out)


def cmd_order(args, cfg, out):
    e = _one(args)
    if e.germs:
        res = reduction.conjugate_into_v(e, cfg.bound, cfg.n_max)
        if isinstance(res, reduction.NotFiniteOrder):
            print(f"infinite\t{certify.describe_certificate(res.certificate)}", file=out)
            return
        if isinstance(res, reduction.UnknownOrder):
            print(f"unknown\t{res.reason}", file=out)
            return
        e = res.v
    r = treepair.tp_order(treepair.tp_from_plmap(e.to_plmap()), cfg.n_max)
    if isinstance(r, treepair.Finite):
        print(f"finite\t{r.order}", file=out)
    elif isinstance(r, treepair.InfiniteCertified):
        w = r.witness
        print(f"infinite\tHigmanLeaf n={w.n} leaf={w.source_leaf or 'root'} -> {w.target_leaf}", file=out)
    else:
        print(f"unknown\tno decision up to n = {r.n_max}", file=out)


def cmd_certify(args, cfg, out):
    e = _one(args)
    S = cfg.genset_obj()
    lb = certify.word_length_lower_bound(e, S)
    print(f"sing_bound\t{lb.sing_bound}", file=out)
    print(f"slope_bound\t{lb.slope_bound}", file=out)
    print(f"lower_bound\t{lb.value}", file=out)
    cert = certify.infinite_order_certificate(e, cfg.bound, cfg.n_max, budget=cfg.budget)
    print(f"certificate\t{certify.describe_certificate(cert)}", file=out)
    if not isinstance(cert, certify.NoCertificate):
        c, period = certify.certificate_constant(cert, S)
        print(f"constant\t{c}\tperiod\t{period}", file=out)


def cmd_distortion(args, cfg, out):
    t = certify.distortion_table(_one(args), args.k, cfg.genset_obj(), budget=cfg.budget)
    text = t.to_tsv(args.decimal)
    if cfg.format == "text":
        rows = [line.split("\t") for line in text.splitlines()]
        width = max(len(c) for r in rows if not r[0].startswith("#") for c in r)
        text = "".join(
            (" ".join(r) if r[0].startswith("#") else "  ".join(c.rjust(width) for c in r)) + "\n" for r in rows
        )
    out.write(text)


def cmd_ball_build(args, cfg, out):
    b = wordlen.bfs_ball(cfg.genset_obj(), args.radius, cfg.ball_limit, cfg.budget)
    if args.out:
        b.save(args.out)
        print(f"radius {b.radius}\tsize {len(b)}\twritten {args.out}", file=out)
    else:
        out.write(b.dump())


def cmd_ball_query(args, cfg, out):
    if not args.ball:
        raise DomainError("--ball is required")
    b = wordlen.load_ball(args.ball)
    for source in args.element or []:
        n = wordlen.exact_length(resolve_va(source), b)
        print(f"not-in-ball\tradius {b.radius}" if isinstance(n, wordlen.NotInBall) else f"length\t{n}", file=out)


def cmd_random(args, cfg, out):
    if args.seed is None:
        raise DomainError("random needs an explicit --seed")
    rng = random.Random(args.seed)
    letters = cfg.genset_obj().letters()
    for _ in range(args.count):
        word = [rng.choice(letters) for _ in range(args.length)]
        e = IDENTITY
        for _, s in word:
            e = va_compose(e, s)
        print(f"{' '.join(n for n, _ in word) or '1'}\t{e}", file=out)


def cmd_fixtures(args, cfg, out):
    for name, e in fixtures().items():
        print(f"{name} = {e}", file=out)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config (genset, bounds, budget, n_max, format)")
    common.add_argument("--element", action="append", metavar="PATH|inline", help="fixture name, file or inline element")
    common.add_argument("--k", type=int, default=1, metavar="N")
    common.add_argument("--radius", type=int, default=2, metavar="N")
    common.add_argument("--seed", type=int, default=None, metavar="N")
    common.add_argument("--decimal", action="store_true", help="add a display-only decimal column")
    common.add_argument("--n-max", type=int, default=None, metavar="N")
    common.add_argument("--point", metavar="X", help="Cantor point such as 1/2^1+ or 1/3")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="vagroup", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    simple = {
        "compose": (cmd_compose, "product e1·e2·... (apply e1 first)"),
        "inv": (cmd_inv, "inverse"),
        "pow": (cmd_pow, "power e^k"),
        "eval": (cmd_eval, "image of --point"),
        "sing": (cmd_sing, "singularity set"),
        "orbits": (cmd_orbits, "singularities grouped by orbit"),
        "reduce": (cmd_reduce, "conjugate to at most one singularity per orbit"),
        "into-v": (cmd_into_v, "conjugate into V or certify infinite order"),
        "order": (cmd_order, "finite order, infinite order or unknown"),
        "certify": (cmd_certify, "word-length lower bound and infinite-order certificate"),
        "fixtures": (cmd_fixtures, "list the named fixtures"),
    }
    for name, (fn, help_) in simple.items():
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("orbit", parents=[common], help="orbit of --point")
    sp.add_argument("--full", action="store_true", help="print the whole trace")
    sp.set_defaults(fn=cmd_orbit)
    sp = sub.add_parser(
        "distortion", parents=[common], help="lower bounds for f^k, k = 1..K",
        epilog=DISTORTION_HELP, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sp.set_defaults(fn=cmd_distortion)
    sp = sub.add_parser("random", parents=[common], help="seeded random words in the generating set")
    sp.add_argument("--length", type=int, default=4)
    sp.add_argument("--count", type=int, default=1)
    sp.set_defaults(fn=cmd_random)
    ball = sub.add_parser("ball", help="Cayley ball oracle")
    bsub = ball.add_subparsers(dest="ball_cmd", required=True, parser_class=_Parser)
    sp = bsub.add_parser("build", parents=[common], help="enumerate the ball of --radius")
    sp.add_argument("--out", metavar="PATH")
    sp.set_defaults(fn=cmd_ball_build)
    sp = bsub.add_parser("query", parents=[common], help="exact length of each --element")
    sp.add_argument("--ball", metavar="PATH")
    sp.set_defaults(fn=cmd_ball_query)
    return p


def run(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = Config.load(args.config)
        if args.n_max is not None:
            if args.n_max <= 0:
                raise DomainError("--n-max must be positive")
            cfg.n_max = args.n_max
        args.fn(args, cfg, out)
    except ResourceLimitError as exc:
        print(f"vagroup: resource limit: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError) as exc:
        print(f"vagroup: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
