"""Admission control over one month of 5-minute slots.

Generates booking requests in wall-clock seconds, maps them to slots and runs
them through capacity-checked insertion. Prints the acceptance rate and the
peak load per day.
"""

import argparse
import random

from advtree.config import preset
from advtree.tree import build


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--requests", type=int, default=20_000)
    ap.add_argument("--capacity", type=int, default=1000, help="link capacity, e.g. Mbit/s")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--origin", type=int, default=1_700_000_000, help="epoch seconds of slot 0")
    args = ap.parse_args()

    cfg = preset("paper-month-5min", origin=args.origin)
    tree = build(cfg)
    rng = random.Random(args.seed)
    g = cfg.granularity_g
    admitted = 0
    for _ in range(args.requests):
        start_ts = args.origin + rng.randrange(cfg.span - g)
        # Bookings of 5 minutes to 8 hours, whole slots.
        duration = g * rng.choice([1, 3, 6, 12, 24, 48, 96])
        end_ts = min(start_ts + duration, args.origin + cfg.span)
        s = cfg.slot_of(start_ts)
        e = cfg.slot_of(end_ts - 1) + 1
        if tree.insert_checked(s, e, rng.randint(10, 200), args.capacity):
            admitted += 1

    print(f"n={cfg.n} slots of {g}s, {admitted}/{args.requests} admitted")
    per_day = 86400 // g
    for day in range(cfg.n // per_day):
        peak = tree.max_reserved(day * per_day, (day + 1) * per_day)
        print(f"day {day + 1:2d}: peak {peak:5d} / {args.capacity}")
    assert tree.audit() is None


if __name__ == "__main__":
    main()
