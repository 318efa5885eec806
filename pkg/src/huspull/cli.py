"""Command-line entry point: ``huspull <subcommand> --key value ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import fields

from . import bench as benchmod
from .datagen import GenParams, generate
from .miner import Bound, MinerConfig, MiningTimeout, mine
from .model import (
    ParseError,
    Pattern,
    format_fixed,
    load_database,
    min_util_from_ratio,
    render_results,
    to_fixed,
)
from .oracle import BudgetExceeded, oracle_mine
from .projection import ULDatabase, peu_seq, project_pattern, seu_of, swu_of, peu_of, utility_of

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_PARSE = 4
EXIT_BUDGET = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _db_args(p: argparse.ArgumentParser):
    p.add_argument("--db", required=True, help="quantitative sequence database file")
    p.add_argument("--profits", required=True, help="item profit table file")


def _threshold_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--min-util-ratio", help="threshold as a fraction of the database utility")
    g.add_argument("--min-util", help="absolute threshold, decimal currency units")


def _output_arg(p: argparse.ArgumentParser):
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="huspull", description="High-utility sequential pattern mining with UL-lists.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mine", help="mine all high-utility sequential patterns")
    _db_args(p)
    _threshold_args(p)
    p.add_argument("--bound", choices=[b.value for b in Bound], default="peu")
    p.add_argument("--no-las", action="store_true", help="disable look-ahead candidate pruning")
    p.add_argument("--no-ips", action="store_true", help="disable irrelevant item pruning")
    p.add_argument("--max-length", type=int, help="cap on pattern length (items)")
    p.add_argument("--time-budget", type=float, help="abort after this many seconds")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for top-level subtrees")
    p.add_argument("--stats", help="write a one-line JSON stats record here ('-' for stderr)")
    _output_arg(p)

    p = sub.add_parser("oracle", help="brute-force reference miner (small inputs only)")
    _db_args(p)
    _threshold_args(p)
    p.add_argument("--max-length", type=int)
    p.add_argument("--node-cap", type=int, default=10_000_000)
    _output_arg(p)

    p = sub.add_parser("gen", help="generate a synthetic database and profit table")
    defaults = GenParams()
    for f in fields(GenParams):
        flag = "--seed" if f.name == "rng_seed" else "--" + f.name.replace("_", "-")
        kind = int if isinstance(getattr(defaults, f.name), int) else float
        p.add_argument(flag, dest=f.name, type=kind, default=getattr(defaults, f.name))
    p.add_argument("--db-out", required=True)
    p.add_argument("--profits-out", required=True)

    p = sub.add_parser("inspect", help="print UL-lists")
    _db_args(p)
    p.add_argument("--sid", type=int, help="only this transaction (1-based)")
    p.add_argument("--letters", action="store_true", help="show items 1..26 as a..z")
    _output_arg(p)

    p = sub.add_parser("bounds", help="print u, SWU, SEU and PEU of a pattern")
    _db_args(p)
    p.add_argument("--pattern", required=True, help="pattern such as '1 -1 2 -2'")
    p.add_argument("--per-sequence", action="store_true", help="also print u and PEU per transaction")
    _output_arg(p)

    p = sub.add_parser("bench", help="run an ablation benchmark plan and write CSV")
    p.add_argument("--plan", required=True, help="JSON plan file")
    p.add_argument("--jobs", type=int, default=1, help="run cells in parallel")
    _output_arg(p)
    return parser


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threshold(args, total_utility: int) -> int:
    if args.min_util is not None:
        return to_fixed(args.min_util)
    return min_util_from_ratio(args.min_util_ratio, total_utility)


def cmd_mine(args) -> int:
    db = load_database(args.db, args.profits)
    config = MinerConfig(
        min_util=_threshold(args, db.total_utility),
        bound=args.bound,
        las=not args.no_las,
        ips=not args.no_ips,
        max_pattern_length=args.max_length,
        time_budget=args.time_budget,
    )
    results, stats = mine(db, config, jobs=args.jobs)
    _emit(render_results(results), args.out)
    if args.stats:
        record = json.dumps(stats.as_dict(), sort_keys=True) + "\n"
        if args.stats == "-":
            sys.stderr.write(record)
        else:
            with open(args.stats, "w", encoding="utf-8") as fh:
                fh.write(record)
    return EXIT_OK


def cmd_oracle(args) -> int:
    db = load_database(args.db, args.profits)
    results = oracle_mine(
        db, min_util=_threshold(args, db.total_utility), max_len=args.max_length, node_cap=args.node_cap
    )
    _emit(render_results(results), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    params = GenParams(**{f.name: getattr(args, f.name) for f in fields(GenParams)})
    db_text, prof_text = generate(params)
    _emit(db_text, args.db_out)
    _emit(prof_text, args.profits_out)
    return EXIT_OK


def cmd_inspect(args) -> int:
    uldb = ULDatabase(load_database(args.db, args.profits))
    uls = uldb.uls if args.sid is None else [uldb.ul(args.sid)]
    text = "".join(f"SID {ul.sid}\n{ul.render(args.letters)}" for ul in uls)
    _emit(text, args.out)
    return EXIT_OK


def cmd_bounds(args) -> int:
    uldb = ULDatabase(load_database(args.db, args.profits))
    pattern = Pattern.parse(args.pattern)
    pd = project_pattern(uldb, pattern)
    lines = [
        f"pattern {pattern.render()}",
        f"u {format_fixed(utility_of(pd))}",
        f"swu {format_fixed(swu_of(pd))}",
        f"seu {format_fixed(seu_of(pd))}",
        f"peu {format_fixed(peu_of(pd))}",
    ]
    if args.per_sequence:
        for ps in pd.views():
            lines.append(
                f"sid {ps.sid} u {format_fixed(max(ps.utilities))} peu {format_fixed(peu_seq(pd, ps.sid))}"
            )
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    with open(args.plan, encoding="utf-8") as fh:
        plan = benchmod.parse_plan(fh.read())
    rows = benchmod.bench(plan, os.path.dirname(os.path.abspath(args.plan)), jobs=args.jobs)
    _emit(benchmod.rows_to_csv(rows), args.out)
    return EXIT_OK


COMMANDS = {
    "mine": cmd_mine,
    "oracle": cmd_oracle,
    "gen": cmd_gen,
    "inspect": cmd_inspect,
    "bounds": cmd_bounds,
    "bench": cmd_bench,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except OSError as exc:
        name = exc.filename or ""
        print(f"huspull: cannot access {name}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"huspull: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (BudgetExceeded, MiningTimeout) as exc:
        print(f"huspull: budget exceeded: {exc or 'time budget'}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError) as exc:
        print(f"huspull: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main():
    sys.exit(run())
