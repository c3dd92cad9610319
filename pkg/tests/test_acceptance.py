"""Exit criteria. Each test is reported as one PASS/FAIL line in the terminal summary."""

import math
import random
from collections import defaultdict

import pytest

from advtree.config import PAPER_MONTH_DIVISORS, binary_config, make_config, preset
from advtree.finger import Finger, query_with_finger
from advtree.oracle import SlotOracle, WorkloadSpec, differential_run, generate, random_interval
from advtree.pointer import PointerTree
from advtree.tree import Tree, build
from advtree.window import WrappingWindow


def random_ops_max_touched(h, ops=10_000, seed=0):
    """Max touched nodes per insert and per query over a seeded random workload."""
    tree = build(binary_config(h))
    worst = defaultdict(int)
    for op in generate(WorkloadSpec(seed=seed, ops=ops), tree.n):
        if op.kind == "query":
            tree.max_reserved(op.start, op.end)
        else:
            (tree.insert if op.kind == "insert" else tree.delete)(op.start, op.end, op.bandwidth)
        worst[op.kind] = max(worst[op.kind], tree.touched)
    return worst


@pytest.mark.criterion("oracle-equivalence")
@pytest.mark.parametrize("name,config", [
    ("binary-64", binary_config(6)),
    ("binary-512", binary_config(9)),
    ("binary-4096", binary_config(12)),
    ("paper-month-5min", preset("paper-month-5min")),
])
def test_oracle_equivalence(name, config, record_property):
    report = differential_run(config, WorkloadSpec(seed=2024, ops=100_000), minimize=False)
    record_property("detail", f"{name}: {report.csv_row()} (ops,mismatches,max_touched,audit_failures)")
    assert report.ops == 100_000
    assert report.mismatches == 0
    assert report.audit_failures == 0


@pytest.mark.criterion("touch-bound 4*lg(n)-7")
@pytest.mark.parametrize("h,bound", [(8, 25), (10, 33), (12, 41)])
def test_touch_bound(h, bound, record_property):
    assert bound == 4 * h - 7
    worst = random_ops_max_touched(h)
    record_property("detail", f"n=2^{h}: insert max {worst['insert']}, query max {worst['query']}, bound {bound}")
    assert worst["insert"] <= bound
    assert worst["query"] <= bound


@pytest.mark.criterion("paper-config-reproduction")
def test_paper_month_preset(record_property):
    cfg = preset("paper-month-5min")
    tree = build(cfg)
    record_property("detail", f"n={cfg.n}, span={cfg.span // 86400} days, nodes={tree.table.size}")
    assert cfg.divisors_X == PAPER_MONTH_DIVISORS == (2, 2, 2, 2, 2, 3, 2, 2, 2, 3, 2, 2)
    assert cfg.granularity_g == 5 * 60
    assert cfg.n == 9216
    assert cfg.span == 32 * 24 * 60 * 60
    assert tree.audit() is None


@pytest.mark.criterion("logarithmic-scaling")
def test_logarithmic_scaling(record_property):
    maxima = {h: random_ops_max_touched(h, seed=h) for h in range(8, 15)}
    ins = [maxima[h]["insert"] for h in range(8, 15)]
    qry = [maxima[h]["query"] for h in range(8, 15)]
    record_property("detail", f"insert maxima {ins}, query maxima {qry} for n=2^8..2^14")
    for seq in (ins, qry):
        assert all(b - a <= 4 for a, b in zip(seq, seq[1:]))


@pytest.mark.criterion("inverse-property")
@pytest.mark.parametrize("config", [preset("paper-month-5min"), make_config([3, 4, 2, 5, 2])],
                         ids=["paper-month", "mixed"])
def test_inverse_pairs(config, record_property):
    rng = random.Random(17)
    tree = build(config)
    fresh = tree.records()
    live = []
    pairs = 0
    while pairs < 10_000 or live:
        if live and (pairs >= 10_000 or rng.random() < 0.45):
            i = rng.randrange(len(live))
            live[i], live[-1] = live[-1], live[i]
            tree.delete(*live.pop())
            continue
        s, e = random_interval(rng, tree.n)
        r = (s, e, rng.randint(1, 10**6))
        tree.insert(*r)
        live.append(r)
        pairs += 1
    record_property("detail", f"n={tree.n}: {pairs} insert/delete pairs, array identical")
    assert tree.records() == fresh


@pytest.mark.criterion("admission-atomicity")
def test_admission_atomicity(record_property):
    cfg = preset("paper-month-5min")
    tree, shadow = build(cfg), build(cfg)
    oracle = SlotOracle(cfg.n)
    rng = random.Random(99)
    capacity = 100
    admitted = []
    counts = {True: 0, False: 0}
    for _ in range(10_000):
        if admitted and rng.random() < 0.25:
            r = admitted.pop(rng.randrange(len(admitted)))
            tree.delete(*r)
            shadow.delete(*r)
            oracle.delete(*r)
        s, e = random_interval(rng, cfg.n)
        bw = rng.randint(1, 40)
        expect = oracle.admits(s, e, bw, capacity)
        before = tree.records()
        got = tree.insert_checked(s, e, bw, capacity)
        assert got == expect
        counts[got] += 1
        if got:
            shadow.insert(s, e, bw)
            oracle.insert(s, e, bw)
            admitted.append((s, e, bw))
            assert tree.records() == shadow.records()
        else:
            assert tree.records() == before
    assert tree.audit() is None
    record_property("detail", f"{counts[True]} admitted, {counts[False]} rejected, all match oracle")
    assert counts[True] > 500 and counts[False] > 500


@pytest.mark.criterion("finger-equivalence")
def test_finger_equivalence(record_property):
    cfg = preset("paper-month-5min")
    tree = build(cfg)
    rng = random.Random(5)
    for _ in range(3000):
        s, e = random_interval(rng, cfg.n)
        tree.insert(s, e, rng.randint(1, 50))
    bound = math.ceil(math.log2(tree.levels)) + 1
    finger = Finger.empty()
    worst_probes = 0
    for _ in range(10_000):
        s, e = random_interval(rng, cfg.n, (0.6, 0.4, 0.0))
        # Second query of the pair lands near the first.
        s2 = min(max(0, s + rng.randint(-64, 64)), cfg.n - 1)
        e2 = min(cfg.n, s2 + rng.randint(1, 96))
        for qs, qe in ((s, e), (s2, e2)):
            value, finger = query_with_finger(tree, finger, qs, qe)
            assert value == tree.max_reserved(qs, qe)
            worst_probes = max(worst_probes, finger.probes)
    record_property("detail", f"20000 finger queries exact; max probes {worst_probes} <= {bound} (L={tree.levels})")
    assert worst_probes <= bound


@pytest.mark.criterion("window-transparency")
def test_window_transparency(record_property):
    w = WrappingWindow([2, 3, 2, 2, 2])  # H = 48 slots
    H = w.horizon
    rng = random.Random(8)
    timeline = defaultdict(int)
    capacity = 60
    now = 0
    for _ in range(10_000):
        r = rng.random()
        if r < 0.05:
            now += rng.randint(1, H // 3)
            before = w.wraps
            w.advance(now)
            if w.wraps > before:
                tree = w.tree
                assert tree.audit() is None
                recycled = 1 - w.half  # zeroed half, now holding the later logical half
                for level in range(2, tree.levels + 1):
                    width = tree.table.nodes_on_level(level) // 2
                    a = tree.table.sigma[level - 1] + recycled * width
                    assert tree.nv[a:a + width] == [0] * width
                    assert tree.mv[a:a + width] == [0] * width
            continue
        s = rng.randint(now, now + H - 1)
        e = rng.randint(s + 1, min(now + H, s + H // 2))
        if r < 0.55:
            bw = rng.randint(1, 25)
            expect = max(timeline[t] for t in range(s, e)) + bw <= capacity
            assert w.reserve_abs(s, e, bw, capacity) == expect
            if expect:
                for t in range(s, e):
                    timeline[t] += bw
        else:
            assert w.query_abs(s, e) == max(timeline[t] for t in range(s, e))
    record_property("detail", f"{w.wraps} wraps over {now} slots (H={H}), all queries and admissions exact")
    assert w.wraps >= 6
    assert w.wraps <= now // H + 1


@pytest.mark.criterion("layout-equivalence")
def test_layout_equivalence(record_property):
    rng = random.Random(31)
    checked = 0
    for _ in range(60):
        xs = [rng.randint(2, 5) for _ in range(rng.randint(0, 5))]
        flat, ref = Tree(make_config(xs)), PointerTree(xs)
        n = flat.n
        live = []
        for _ in range(300):
            s = rng.randrange(n)
            e = rng.randint(s + 1, n)
            r = rng.random()
            if r < 0.3:
                bw = rng.randint(1, 9)
                flat.insert(s, e, bw)
                ref.insert(s, e, bw)
                live.append((s, e, bw))
            elif r < 0.45 and live:
                d = live.pop(rng.randrange(len(live)))
                flat.delete(*d)
                ref.delete(*d)
            elif r < 0.65:
                bw, cap = rng.randint(1, 9), rng.randint(0, 40)
                got = flat.insert_checked(s, e, bw, cap)
                assert got == ref.insert_checked(s, e, bw, cap)
                if got:
                    live.append((s, e, bw))
            else:
                assert flat.max_reserved(s, e) == ref.max_reserved(s, e)
            assert flat.records() == ref.records()
            checked += 1
    record_property("detail", f"60 random configs, {checked} ops, records identical after every op")
