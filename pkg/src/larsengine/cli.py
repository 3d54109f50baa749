"""Command line: stream a signal file through a program, or run benchmarks."""
from __future__ import annotations

import argparse
import sys

from .bench import benchmark, write_csv
from .engine import Engine, EngineConfig
from .parser import ParseError, parse_program, parse_signals
from .static import lars_to_asp


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="larsengine", description="Stream reasoning over LARS programs.")
    ap.add_argument("--program", metavar="FILE", help="program file")
    ap.add_argument("--strategy", choices=("oneshot", "incremental"), default="incremental")
    ap.add_argument("--mode", choices=("push", "pull"), default="push")
    ap.add_argument("--input", metavar="FILE", help="signal file, '-' for standard input")
    ap.add_argument("--until", type=int, metavar="T", help="last time point to evaluate")
    ap.add_argument("--gc-cutoff", action="store_true", help="drop stream facts no window can reach")
    ap.add_argument("--strict-guards", action="store_true", help="require guards for window variables")
    ap.add_argument("--budget", type=int, help="solver step budget")
    ap.add_argument("--dump-encoding", action="store_true", help="print the static encoding and exit")
    ap.add_argument("--bench", metavar="SCENARIO", choices=("A", "B"), help="run a benchmark scenario")
    ap.add_argument("--setup", choices=("A1", "A2", "B1", "B2"))
    ap.add_argument("--window", type=int, action="append", metavar="N", help="window size (repeatable)")
    ap.add_argument("--timepoints", type=int, default=100, metavar="TP")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--warmup", type=int, default=2)
    ap.add_argument("--csv", metavar="FILE", help="write benchmark rows here instead of standard output")
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _stream(args, out) -> int:
    program = parse_program(_read(args.program))
    if args.dump_encoding:
        t = args.until if args.until is not None else 0
        for r in lars_to_asp(program, t):
            print(r, file=out)
        return 0
    events = parse_signals(_read(args.input), program.extensional or None) if args.input else []
    eng = Engine(
        EngineConfig(
            program,
            args.strategy,
            args.mode,
            budget=args.budget,
            gc_cutoff=args.gc_cutoff,
            strict_guards=args.strict_guards,
        )
    )
    by_time = {}
    for ev in events:
        by_time.setdefault(ev.time, []).append(ev.atom)
    last = max(by_time, default=0)
    until = args.until if args.until is not None else last
    if until < last:
        raise ValueError(f"--until {until} precedes the last signal time {last}")
    for t in range(0, until + 1):
        eng.append(t, by_time.get(t, ()))
        print(eng.evaluate(t).line(), file=out)
    return 0


def _bench(args, out) -> int:
    if not args.setup or not args.setup.startswith(args.bench):
        raise ValueError(f"--setup must be one of the {args.bench} setups")
    strategies = ("oneshot", "incremental") if args.strategy is None else (args.strategy,)
    reports = []
    for n in args.window or [20]:
        for s in strategies:
            reports.append(benchmark(args.setup, s, n, args.timepoints, args.seed, args.runs, args.warmup, args.budget))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            write_csv(reports, fh)
    else:
        write_csv(reports, out)
    for r in reports:
        if r.flagged:
            print(f"warning: {r.setup} {r.strategy} n={r.n}: some evaluations were unknown", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    if not argv:
        ap.print_usage(sys.stderr)
        return 2
    args = ap.parse_args(argv)
    if "--strategy" not in argv and args.bench:
        args.strategy = None
    try:
        if args.bench:
            return _bench(args, sys.stdout)
        if not args.program:
            ap.error("--program or --bench is required")
        return _stream(args, sys.stdout)
    except (ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
