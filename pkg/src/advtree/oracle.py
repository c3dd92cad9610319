"""Brute-force slot oracle and the randomized differential-testing engine."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .config import Interval, RangeError, Reservation, TreeConfig
from .tree import Tree

ORACLE_MAX_SLOTS = 1 << 16


class LedgerError(KeyError):
    """A delete that does not match any outstanding reservation."""


class Op(NamedTuple):
    kind: str  # "insert" | "delete" | "query" | "advance"
    start: int
    end: int = 0
    bandwidth: int = 0

    def __str__(self) -> str:
        if self.kind == "query":
            return f"query {self.start} {self.end}"
        if self.kind == "advance":
            return f"advance {self.start}"
        return f"{self.kind} {self.start} {self.end} {self.bandwidth}"


class SlotOracle:
    """One integer per slot; every operation touches every slot it covers."""

    def __init__(self, n: int):
        if n > ORACLE_MAX_SLOTS:
            raise RangeError(f"oracle is capped at {ORACLE_MAX_SLOTS} slots, got {n}")
        self.n = n
        self.loads = np.zeros(n, dtype=np.int64)
        self.ledger: Counter[Reservation] = Counter()

    def _check(self, start: int, end: int) -> None:
        if not (0 <= start < end <= self.n):
            raise RangeError(f"interval [{start}, {end}) not inside [0, {self.n})")

    def insert(self, start: int, end: int, bandwidth: int) -> None:
        self._check(start, end)
        self.loads[start:end] += bandwidth
        self.ledger[Reservation(Interval(start, end), bandwidth)] += 1

    def delete(self, start: int, end: int, bandwidth: int) -> None:
        self._check(start, end)
        key = Reservation(Interval(start, end), bandwidth)
        if self.ledger[key] <= 0:
            del self.ledger[key]
            raise LedgerError(f"no outstanding reservation {bandwidth} over [{start}, {end})")
        self.ledger[key] -= 1
        if not self.ledger[key]:
            del self.ledger[key]
        self.loads[start:end] -= bandwidth

    def max_reserved(self, start: int, end: int) -> int:
        self._check(start, end)
        return int(self.loads[start:end].max())

    def admits(self, start: int, end: int, bandwidth: int, capacity: int) -> bool:
        return self.max_reserved(start, end) + bandwidth <= capacity

    def recomputed_loads(self) -> np.ndarray:
        """Loads rebuilt from the ledger alone, for validating the incremental array."""
        fresh = np.zeros(self.n, dtype=np.int64)
        for (iv, bw), count in self.ledger.items():
            fresh[iv.start:iv.end] += bw * count
        return fresh


def oracle_apply(o: SlotOracle, op: Op) -> int | None:
    if op.kind == "insert":
        o.insert(op.start, op.end, op.bandwidth)
    elif op.kind == "delete":
        o.delete(op.start, op.end, op.bandwidth)
    elif op.kind == "query":
        return o.max_reserved(op.start, op.end)
    else:
        raise ValueError(f"oracle cannot apply {op.kind!r}")
    return None


@dataclass
class WorkloadSpec:
    seed: int = 0
    ops: int = 1000
    insert_frac: float = 0.45
    delete_frac: float = 0.2
    query_frac: float = 0.35
    # Weights for short (1-4 slots), medium (~sqrt n) and near-full-span intervals.
    length_mix: tuple[float, float, float] = (0.4, 0.4, 0.2)
    bw_min: int = 1
    bw_max: int = 100

    def __post_init__(self) -> None:
        fracs = (self.insert_frac, self.delete_frac, self.query_frac)
        if min(fracs) < 0 or not math.isclose(sum(fracs), 1.0, abs_tol=1e-9):
            raise ValueError(f"op fractions must be non-negative and sum to 1, got {fracs}")
        if min(self.length_mix) < 0 or sum(self.length_mix) <= 0:
            raise ValueError(f"bad length mix {self.length_mix}")
        if not 1 <= self.bw_min <= self.bw_max:
            raise ValueError(f"bad bandwidth range [{self.bw_min}, {self.bw_max}]")
        if self.ops < 0:
            raise ValueError("ops must be non-negative")


def random_interval(rng: random.Random, n: int, mix: Sequence[float] = (0.4, 0.4, 0.2)) -> tuple[int, int]:
    kind = rng.choices((0, 1, 2), weights=mix)[0]
    if kind == 0:
        length = rng.randint(1, min(4, n))
    elif kind == 1:
        length = rng.randint(1, max(1, min(n, 2 * math.isqrt(n))))
    else:
        length = rng.randint(max(1, n - n // 8), n)
    start = rng.randint(0, n - length)
    return start, start + length


def generate(spec: WorkloadSpec, n: int) -> list[Op]:
    """Deterministic op sequence for a universe of ``n`` slots.

    Deletes always replay an outstanding insert; with nothing outstanding the
    generator emits an insert instead.
    """
    rng = random.Random(spec.seed)
    outstanding: list[Op] = []
    ops: list[Op] = []
    weights = (spec.insert_frac, spec.delete_frac, spec.query_frac)
    for _ in range(spec.ops):
        kind = rng.choices(("insert", "delete", "query"), weights=weights)[0]
        if kind == "delete" and not outstanding:
            kind = "insert"
        if kind == "delete":
            i = rng.randrange(len(outstanding))
            outstanding[i], outstanding[-1] = outstanding[-1], outstanding[i]
            ins = outstanding.pop()
            ops.append(Op("delete", ins.start, ins.end, ins.bandwidth))
            continue
        start, end = random_interval(rng, n, spec.length_mix)
        if kind == "insert":
            op = Op("insert", start, end, rng.randint(spec.bw_min, spec.bw_max))
            outstanding.append(op)
        else:
            op = Op("query", start, end)
        ops.append(op)
    return ops


def inverse_suffix(ops: Iterable[Op]) -> list[Op]:
    """Deletes undoing every still-outstanding insert of ``ops``, newest first."""
    live: Counter[Op] = Counter()
    order: list[Op] = []
    for op in ops:
        if op.kind == "insert":
            live[op] += 1
            order.append(op)
        elif op.kind == "delete":
            live[op._replace(kind="insert")] -= 1
    out = []
    for op in reversed(order):
        if live[op] > 0:
            live[op] -= 1
            out.append(op._replace(kind="delete"))
    return out


@dataclass
class OpStats:
    count: int = 0
    total_touched: int = 0
    max_touched: int = 0
    total_ns: int = 0

    def add(self, touched: int, ns: int = 0) -> None:
        self.count += 1
        self.total_touched += touched
        self.total_ns += ns
        if touched > self.max_touched:
            self.max_touched = touched

    @property
    def avg_touched(self) -> float:
        return self.total_touched / self.count if self.count else 0.0


@dataclass
class Report:
    ops: int = 0
    mismatches: int = 0
    audit_failures: int = 0
    max_touched: int = 0
    stats: dict[str, OpStats] = field(default_factory=dict)
    first_divergence: int | None = None
    reproduction: list[Op] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0 and self.audit_failures == 0

    def csv_header(self) -> str:
        return "ops,mismatches,max_touched,audit_failures"

    def csv_row(self) -> str:
        return f"{self.ops},{self.mismatches},{self.max_touched},{self.audit_failures}"

    def lines(self) -> list[str]:
        out = [f"ops={self.ops} mismatches={self.mismatches} audit_failures={self.audit_failures} "
               f"max_touched={self.max_touched}"]
        for kind in sorted(self.stats):
            s = self.stats[kind]
            out.append(f"{kind}: count={s.count} avg_touched={s.avg_touched:.3f} max_touched={s.max_touched}")
        if self.first_divergence is not None:
            out.append(f"first divergence at op {self.first_divergence}; reproduction ({len(self.reproduction)} ops):")
            out.extend(f"  {op}" for op in self.reproduction)
        return out


TreeFactory = Callable[[TreeConfig], Tree]


def _lockstep(config: TreeConfig, ops: Sequence[Op], tree_factory: TreeFactory,
              audit_every: int, report: Report | None = None, stop_early: bool = False) -> int | None:
    """Run ``ops`` on a tree and an oracle side by side.

    Returns the index of the first op after which they disagree (or the audit
    fails), else None. Fills ``report`` when given.
    """
    tree = tree_factory(config)
    oracle = SlotOracle(config.n)
    first = None
    mutations = 0
    for i, op in enumerate(ops):
        bad = False
        if op.kind == "query":
            got = tree.max_reserved(op.start, op.end)
            want = oracle.max_reserved(op.start, op.end)
            if got != want:
                bad = True
                if report is not None:
                    report.mismatches += 1
        else:
            if op.kind == "insert":
                tree.insert(op.start, op.end, op.bandwidth)
                oracle.insert(op.start, op.end, op.bandwidth)
            elif op.kind == "delete":
                tree.delete(op.start, op.end, op.bandwidth)
                oracle.delete(op.start, op.end, op.bandwidth)
            else:
                raise ValueError(f"unsupported op {op.kind!r}")
            mutations += 1
            if audit_every and mutations % audit_every == 0 and tree.audit() is not None:
                bad = True
                if report is not None:
                    report.audit_failures += 1
        if report is not None:
            report.ops += 1
            report.stats.setdefault(op.kind, OpStats()).add(tree.touched)
            report.max_touched = max(report.max_touched, tree.touched)
        if bad and first is None:
            first = i
            if stop_early:
                return first
    if first is None and len(ops):
        # Final sweep: full audit plus every slot load.
        if tree.audit() is not None or tree.loads() != oracle.loads.tolist():
            first = len(ops) - 1
            if report is not None:
                report.audit_failures += 1
    return first


def _ledger_consistent(ops: Sequence[Op]) -> bool:
    live: Counter[tuple[int, int, int]] = Counter()
    for op in ops:
        key = (op.start, op.end, op.bandwidth)
        if op.kind == "insert":
            live[key] += 1
        elif op.kind == "delete":
            if live[key] <= 0:
                return False
            live[key] -= 1
    return True


def shrink(config: TreeConfig, ops: Sequence[Op], tree_factory: TreeFactory = Tree,
           max_passes: int = 4) -> list[Op]:
    """Greedy reduction of a diverging sequence.

    Cut everything after the first divergence, then drop single ops while the
    sequence stays ledger-consistent and still diverges.
    """
    def diverges(seq: Sequence[Op]) -> int | None:
        return _lockstep(config, seq, tree_factory, audit_every=1, stop_early=True)

    first = diverges(ops)
    if first is None:
        return list(ops)
    current = list(ops[: first + 1])
    for _ in range(max_passes):
        changed = False
        i = 0
        while i < len(current):
            candidate = current[:i] + current[i + 1:]
            if candidate and _ledger_consistent(candidate):
                hit = diverges(candidate)
                if hit is not None:
                    current = candidate[: hit + 1]
                    changed = True
                    continue
            i += 1
        if not changed:
            break
    return current


def differential_run(config: TreeConfig, spec: WorkloadSpec, *, tree_factory: TreeFactory = Tree,
                     audit_every: int | None = None, ops: Sequence[Op] | None = None,
                     minimize: bool = True) -> Report:
    """Replay a generated workload on the tree and the slot oracle in lockstep.

    Every query is compared; the mv audit runs after every ``audit_every``-th
    mutation (default: about 200 audits per run), plus once at the end along
    with a full comparison of slot loads.
    """
    if config.n > ORACLE_MAX_SLOTS:
        raise RangeError(f"n = {config.n} exceeds the oracle cap of {ORACLE_MAX_SLOTS} slots")
    seq = list(ops) if ops is not None else generate(spec, config.n)
    if audit_every is None:
        audit_every = max(1, len(seq) // 200)
    report = Report()
    report.first_divergence = _lockstep(config, seq, tree_factory, audit_every, report)
    if report.first_divergence is not None and minimize:
        report.reproduction = shrink(config, seq[: report.first_divergence + 1], tree_factory)
    return report
