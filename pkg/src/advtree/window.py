"""Absolute-time facade that recycles the two halves of a fixed tree.

The physical tree spans ``2H`` slots (root divisor 2, so each half is one root
subtree). Absolute slot ``a`` lives at physical slot ``(a - origin) mod 2H``.
Once ``now`` passes the end of the earlier half, that half is zeroed and
becomes the later one.
"""

from __future__ import annotations

from typing import Sequence

from .config import RangeError, TreeConfig
from .tree import Tree


class HorizonError(RangeError):
    """Interval reaches past ``now + H``, beyond what the window can hold."""


class PastIntervalError(RangeError):
    """Interval starts before ``now``."""


class TimeRegressionError(ValueError):
    pass


class WrappingWindow:
    def __init__(self, half_divisors: Sequence[int], origin: int = 0, word_bits: int = 64):
        self.config = TreeConfig(divisors_X=(2, *half_divisors), word_bits=word_bits)
        self.tree = Tree(self.config)
        self.horizon = self.config.n // 2
        self.origin = origin
        self.now = origin
        self.base_time = origin
        self.wraps = 0
        self.recycles = 0

    @classmethod
    def from_config(cls, config: TreeConfig) -> "WrappingWindow":
        if not config.divisors_X or config.divisors_X[0] != 2:
            raise ValueError("a windowed tree needs root divisor 2")
        return cls(config.divisors_X[1:], origin=0, word_bits=config.word_bits)

    @property
    def half(self) -> int:
        """Physical half (0 or 1) that holds the earlier logical half."""
        return ((self.base_time - self.origin) // self.horizon) % 2

    def advance(self, now: int) -> None:
        if now < self.now:
            raise TimeRegressionError(f"time went backwards: {now} < {self.now}")
        self.now = now
        passed = (now - self.base_time) // self.horizon
        if passed <= 0:
            return
        # Two resets already clear everything; further wraps only move the base.
        for _ in range(min(passed, 2)):
            self._reset_half(self.half)
            self.base_time += self.horizon
        self.base_time += (passed - min(passed, 2)) * self.horizon
        self.wraps += passed

    def _reset_half(self, which: int) -> None:
        tree = self.tree
        nv, mv = tree.nv, tree.mv
        for level in range(2, tree.levels + 1):
            first = tree.table.sigma[level - 1]
            width = tree.table.nodes_on_level(level) // 2
            a = first + which * width
            nv[a:a + width] = [0] * width
            mv[a:a + width] = [0] * width
        tree._refresh_mv(1, 2, 2)
        tree.version += 1
        self.recycles += 1

    def _physical(self, start: int, end: int) -> list[tuple[int, int]]:
        if start >= end:
            raise RangeError(f"empty interval [{start}, {end})")
        if start < self.now:
            raise PastIntervalError(f"interval [{start}, {end}) starts before now = {self.now}")
        if end > self.now + self.horizon:
            raise HorizonError(f"interval [{start}, {end}) ends after now + H = {self.now + self.horizon}")
        span = 2 * self.horizon
        ps = (start - self.origin) % span
        pe = ps + (end - start)
        if pe <= span:
            return [(ps, pe)]
        # Crosses the physical seam: split into the tail and the head of the array.
        return [(ps, span), (0, pe - span)]

    def reserve_abs(self, start: int, end: int, bandwidth: int, capacity: int | None = None) -> bool:
        parts = self._physical(start, end)
        if capacity is None:
            for s, e in parts:
                self.tree.insert(s, e, bandwidth)
            return True
        done = []
        for s, e in parts:
            if not self.tree.insert_checked(s, e, bandwidth, capacity):
                for ds, de in done:
                    self.tree.delete(ds, de, bandwidth)
                return False
            done.append((s, e))
        return True

    def release_abs(self, start: int, end: int, bandwidth: int) -> None:
        for s, e in self._physical(start, end):
            self.tree.delete(s, e, bandwidth)

    def query_abs(self, start: int, end: int) -> int:
        return max(self.tree.max_reserved(s, e) for s, e in self._physical(start, end))
