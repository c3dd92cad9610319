"""Max touched nodes per op on binary trees of growing size.

Prints CSV: lg_n, n, insert_max, query_max, worst_insert (4 lg n - 1),
worst_query (4 lg n - 3), paper_bound (4 lg n - 7).
"""

import argparse

from advtree.config import binary_config
from advtree.oracle import WorkloadSpec, generate
from advtree.tree import build


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--min-levels", type=int, default=3)
    ap.add_argument("--max-levels", type=int, default=16)
    ap.add_argument("--ops", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("lg_n,n,insert_max,query_max,worst_insert,worst_query,paper_bound")
    for h in range(args.min_levels, args.max_levels + 1):
        tree = build(binary_config(h))
        worst = {"insert": 0, "delete": 0, "query": 0}
        for op in generate(WorkloadSpec(seed=args.seed, ops=args.ops), tree.n):
            if op.kind == "query":
                tree.max_reserved(op.start, op.end)
            elif op.kind == "insert":
                tree.insert(op.start, op.end, op.bandwidth)
            else:
                tree.delete(op.start, op.end, op.bandwidth)
            worst[op.kind] = max(worst[op.kind], tree.touched)
        print(f"{h},{tree.n},{worst['insert']},{worst['query']},{4 * h - 1},{4 * h - 3},{4 * h - 7}")


if __name__ == "__main__":
    main()
