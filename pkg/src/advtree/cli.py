"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse error, 3 range or capacity refusal,
4 differential mismatch.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, TextIO

from .config import ConfigError, RangeError, TreeConfig, preset
from .finger import Finger, invalidate, query_with_finger
from .oracle import ORACLE_MAX_SLOTS, Op, OpStats, WorkloadSpec, differential_run, generate
from .tree import Tree
from .window import WrappingWindow

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_RANGE, EXIT_MISMATCH = 0, 1, 2, 3, 4

CONFIG_KEYS = ("granularity_g", "divisors", "origin", "capacity", "preset")


class ParseError(ValueError):
    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


class UsageError(Exception):
    pass


@dataclass
class ConfigFile:
    tree: TreeConfig
    capacity: int | None = None
    preset: str | None = None


def _int(token: str, path: str, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(path, lineno, f"{what}: expected an integer, got {token!r}") from None


def parse_config(text: str, path: str = "<config>") -> ConfigFile:
    """Flat ``key = value`` document; ``#`` starts a comment."""
    values: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise ParseError(path, lineno, f"expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split(sep, 1))
        if key not in CONFIG_KEYS:
            raise ParseError(path, lineno, f"unknown key {key!r}")
        if key in values:
            raise ParseError(path, lineno, f"duplicate key {key!r}")
        values[key] = (value, lineno)

    if ("divisors" in values) == ("preset" in values):
        raise ParseError(path, 0, "exactly one of 'divisors' or 'preset' must be given")

    def number(key: str) -> int | None:
        if key not in values:
            return None
        value, lineno = values[key]
        return _int(value, path, lineno, key)

    g = number("granularity_g")
    origin = number("origin") or 0
    capacity = number("capacity")
    if capacity is not None and capacity < 0:
        raise ParseError(path, values["capacity"][1], "capacity must be non-negative")
    try:
        if "preset" in values:
            name = values["preset"][0]
            tree = preset(name, granularity_g=g, origin=origin)
            return ConfigFile(tree, capacity, name)
        value, lineno = values["divisors"]
        tokens = value.strip("[]{}() ").replace(",", " ").split()
        divisors = tuple(_int(t, path, lineno, "divisors") for t in tokens)
        tree = TreeConfig(granularity_g=1 if g is None else g, divisors_X=divisors, origin_S_M=origin)
    except ConfigError as exc:
        raise ParseError(path, 0, str(exc)) from None
    return ConfigFile(tree, capacity)


def load_config(path: str) -> ConfigFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text, path)


_ARITY = {"insert": 3, "delete": 3, "query": 2, "advance": 1}


def parse_workload(lines: TextIO | list[str], path: str = "<workload>") -> Iterator[tuple[int, Op]]:
    """Yield ``(line number, op)`` for every non-blank, non-comment line."""
    for lineno, raw in enumerate(lines, start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        kind, args = tokens[0], tokens[1:]
        if kind not in _ARITY:
            raise ParseError(path, lineno, f"unknown operation {kind!r}")
        if len(args) != _ARITY[kind]:
            raise ParseError(path, lineno, f"{kind} takes {_ARITY[kind]} arguments, got {len(args)}")
        nums = [_int(a, path, lineno, kind) for a in args]
        yield lineno, Op(kind, *nums)


def replay(cfg: ConfigFile, lines: TextIO | list[str], out: TextIO, *, path: str = "<workload>",
           check_capacity: bool = False, finger: bool = False, window: bool = False) -> int:
    if check_capacity and cfg.capacity is None:
        raise UsageError("--check-capacity needs 'capacity' in the config")
    if finger and window:
        raise UsageError("--finger and --window cannot be combined")
    capacity = cfg.capacity if check_capacity else None
    try:
        win = WrappingWindow.from_config(cfg.tree) if window else None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tree = win.tree if win else Tree(cfg.tree)
    fing = Finger.empty()

    for lineno, op in parse_workload(lines, path):
        try:
            if op.kind == "advance":
                if win is None:
                    raise UsageError(f"{path}:{lineno}: 'advance' needs --window")
                win.advance(op.start)
            elif op.kind == "query":
                if win is not None:
                    value = win.query_abs(op.start, op.end)
                elif finger:
                    value, fing = query_with_finger(tree, fing, op.start, op.end)
                else:
                    value = tree.max_reserved(op.start, op.end)
                print(value, file=out)
            elif op.kind == "insert":
                if win is not None:
                    ok = win.reserve_abs(op.start, op.end, op.bandwidth, capacity)
                elif capacity is not None:
                    ok = tree.insert_checked(op.start, op.end, op.bandwidth, capacity)
                else:
                    ok = None
                    tree.insert(op.start, op.end, op.bandwidth)
                if capacity is not None:
                    print("admitted" if ok else "rejected", file=out)
                fing = invalidate(fing)
            else:
                if win is not None:
                    win.release_abs(op.start, op.end, op.bandwidth)
                else:
                    tree.delete(op.start, op.end, op.bandwidth)
                fing = invalidate(fing)
        except (RangeError, ValueError, OverflowError) as exc:
            if isinstance(exc, ParseError):
                raise
            print(f"{path}:{lineno}: range error: {exc}", file=sys.stderr)
            return EXIT_RANGE
    return EXIT_OK


def parse_mix(text: str) -> tuple[float, float, float]:
    try:
        parts = [float(p) for p in text.replace(":", ",").split(",")]
    except ValueError:
        parts = []
    if len(parts) != 3:
        raise UsageError(f"--mix wants insert,delete,query fractions, got {text!r}")
    return parts[0], parts[1], parts[2]


def cmd_replay(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    try:
        fh = open(args.workload)
    except OSError as exc:
        raise UsageError(f"cannot read workload {args.workload}: {exc.strerror}") from None
    with fh:
        return replay(cfg, fh, sys.stdout, path=args.workload, check_capacity=args.check_capacity,
                      finger=args.finger, window=args.window)


def cmd_difftest(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    if cfg.tree.n > ORACLE_MAX_SLOTS:
        print(f"refusing: n = {cfg.tree.n} slots exceeds the brute-force oracle cap of {ORACLE_MAX_SLOTS}",
              file=sys.stderr)
        return EXIT_RANGE
    ins, dele, qry = parse_mix(args.mix)
    try:
        spec = WorkloadSpec(seed=args.seed, ops=args.ops, insert_frac=ins, delete_frac=dele, query_frac=qry)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = differential_run(cfg.tree, spec)
    print(report.csv_header())
    print(report.csv_row())
    if not report.ok:
        for line in report.lines()[1:]:
            print(line, file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def bench(cfg: ConfigFile, ops: int, seed: int) -> dict[str, OpStats]:
    """Touched-node and timing statistics per op kind on a random workload."""
    tree = Tree(cfg.tree)
    stats: dict[str, OpStats] = {k: OpStats() for k in ("insert", "delete", "query")}
    seq = generate(WorkloadSpec(seed=seed, ops=ops), cfg.tree.n)
    clock = time.perf_counter_ns
    for op in seq:
        t0 = clock()
        if op.kind == "insert":
            tree.insert(op.start, op.end, op.bandwidth)
        elif op.kind == "delete":
            tree.delete(op.start, op.end, op.bandwidth)
        else:
            tree.max_reserved(op.start, op.end)
        stats[op.kind].add(tree.touched, clock() - t0)
    if cfg.capacity is not None:
        rng = random.Random(seed)
        checked = stats["insert_checked"] = OpStats()
        for op in seq:
            if op.kind != "insert":
                continue
            t0 = clock()
            tree.insert_checked(op.start, op.end, rng.randint(1, max(1, cfg.capacity)), cfg.capacity)
            checked.add(tree.touched, clock() - t0)
    return stats


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    stats = bench(cfg, args.ops, args.seed)
    print("op,count,avg_touched,max_touched,ns_per_op")
    for kind, s in stats.items():
        ns = s.total_ns // s.count if s.count else 0
        print(f"{kind},{s.count},{s.avg_touched:.3f},{s.max_touched},{ns}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default; 2 is reserved for parse errors
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="advtree", description="Advance-reservation segment tree tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("replay", help="apply a workload file and print query results")
    p.add_argument("config")
    p.add_argument("workload")
    p.add_argument("--check-capacity", action="store_true", help="admit inserts only within config capacity")
    p.add_argument("--finger", action="store_true", help="answer queries through a finger")
    p.add_argument("--window", action="store_true", help="treat slots as absolute time over a wrapping window")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("difftest", help="randomized differential test against the slot oracle")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--ops", type=int, default=100_000)
    p.add_argument("--mix", default="0.45,0.2,0.35", help="insert,delete,query fractions")
    p.set_defaults(func=cmd_difftest)

    p = sub.add_parser("bench", help="touched-node and timing CSV per op kind")
    p.add_argument("config")
    p.add_argument("--ops", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"advtree: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"advtree: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
