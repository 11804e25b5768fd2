"""Command line interface.

Subcommands::

    learn      dump statistics learned from a trace (also ``stats dump``)
    gen        generate terms of one sort
    replay     replay a trace round by round
    grid       list strategy configurations
    cover      greedy cover over a results matrix
    aggregate  total / gained / lost against the reference strategy

Exit status is 0 on success, 1 on bad input and 2 on internal errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Sequence

from .errors import InstGenError
from .generator import Effort, GenConfig, Pick, TermMaker, make_rng
from .harness import (
    GridSpec,
    aggregate_table,
    aggregate_vs_reference,
    cover_table,
    enumerate_grid,
    greedy_cover,
    load_results,
)
from .replay import parse_trace, run_session
from .stats import StatsStore, dump_stats, load_stats
from .terms import Signature, parse_signature, print_term

log = logging.getLogger("instgen")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as f:
        return f.read()


def _load_inputs(args):
    sig = parse_signature(_read(args.sig)) if getattr(args, "sig", None) else None
    trace = parse_trace(_read(args.trace), sig) if getattr(args, "trace", None) else None
    full_sig = trace.signature if trace else sig or Signature()
    if getattr(args, "stats", None):
        store = load_stats(_read(args.stats), full_sig)
    else:
        store = StatsStore()
    if trace:
        for rnd in trace.rounds:
            for rec in rnd.observed:
                store.observe_all(rec.terms)
    return trace, store, full_sig


def _gen_config(args) -> GenConfig:
    return GenConfig(
        pick=Pick(args.pick),
        depth=args.depth,
        flip=args.flip,
        effort=Effort(args.effort),
        seed=args.seed,
        batch_size=args.batch_size,
    )


def _add_gen_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pick", choices=[x.value for x in Pick], default="random")
    p.add_argument("--depth", type=int, default=0)
    p.add_argument("--flip", type=float, default=None)
    p.add_argument("--effort", choices=[x.value for x in Effort], default="lastcall")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=20)
    p.add_argument("--universe", choices=["observed", "signature"], default="observed",
                   help="candidate symbols: those observed so far, or the whole signature")


def cmd_learn(args) -> int:
    _, store, _ = _load_inputs(args)
    sys.stdout.write(dump_stats(store))
    return 0


def cmd_gen(args) -> int:
    _, store, sig = _load_inputs(args)
    cfg = _gen_config(args)
    universe = list(sig.symbols.values()) if args.universe == "signature" else None
    maker = TermMaker(cfg, store, universe)
    rng = make_rng(cfg.seed)
    sort = sig.sort(args.sort)
    for _ in range(args.count):
        print(print_term(maker.make(sort, rng)))
    return 0


def cmd_replay(args) -> int:
    sig = parse_signature(_read(args.sig)) if args.sig else None
    trace = parse_trace(_read(args.trace), sig)
    cfg = _gen_config(args)
    universe = list(trace.signature.symbols.values()) if args.universe == "signature" else None
    report = run_session(trace, cfg, universe=universe, feed_back=args.feed_back)
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_sexpr())
    return 0


def _csv_list(kind):
    def parse(text: str):
        return [kind(x) for x in text.split(",") if x.strip()]
    return parse


def cmd_grid(args) -> int:
    if args.paper:
        spec = GridSpec.full_evaluation()
    else:
        spec = GridSpec(args.efforts, args.picks, args.depths, args.flips)
    for cfg in enumerate_grid(spec, seed=args.seed):
        print(cfg.strategy_id)
    return 0


def cmd_cover(args) -> int:
    m = load_results(_read(args.input))
    rows = greedy_cover(m, top=args.top, exhaustive=args.exhaustive)
    sys.stdout.write(cover_table(rows, args.format))
    return 0


def cmd_aggregate(args) -> int:
    m = load_results(_read(args.input))
    aggs = aggregate_vs_reference(m, args.ref)
    sys.stdout.write(aggregate_table(aggs, args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="instgen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("learn", help="dump statistics learned from a trace")
    p.add_argument("--sig")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("stats", help="statistics utilities")
    p.add_argument("action", choices=["dump"])
    p.add_argument("--sig")
    p.add_argument("--trace", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("gen", help="generate terms of one sort")
    p.add_argument("--sig")
    p.add_argument("--trace")
    p.add_argument("--stats", help="statistics file written by learn")
    p.add_argument("--sort", required=True)
    p.add_argument("--count", type=int, default=20)
    _add_gen_options(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("replay", help="replay a trace round by round")
    p.add_argument("--sig")
    p.add_argument("--trace", required=True)
    p.add_argument("--format", choices=["sexpr", "json"], default="sexpr")
    p.add_argument("--feed-back", action="store_true",
                   help="also learn from the generated terms")
    _add_gen_options(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("grid", help="list strategy configurations")
    p.add_argument("--paper", "--full", dest="paper", action="store_true",
                   help="the 110-strategy evaluation grid")
    p.add_argument("--efforts", type=_csv_list(Effort), default=[Effort.LASTCALL])
    p.add_argument("--picks", type=_csv_list(Pick), default=[Pick.RANDOM])
    p.add_argument("--depths", type=_csv_list(int), default=[0])
    p.add_argument("--flips", type=_csv_list(float), default=[0.0])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("cover", help="greedy cover over a results matrix")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--top", type=int)
    p.add_argument("--exhaustive", action="store_true",
                   help="keep placing strategies that add no new solves")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("aggregate", help="total / gained / lost against the reference")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--ref", help="reference strategy (overrides #reference=)")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.set_defaults(func=cmd_aggregate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InstGenError, OSError, ValueError) as e:
        print(f"instgen: error: {e}", file=sys.stderr)
        return 1
    except Exception:
        log.exception("internal error")
        return 2


if __name__ == "__main__":
    sys.exit(main())
