"""The reservation tree: fixed-shape segment tree over slotted time.

Every node ``N`` keeps two integers:

* ``nv[N]`` -- bandwidth reserved over exactly the whole interval of ``N``;
* ``mv[N]`` -- the largest total reserved anywhere strictly below ``N``,
  i.e. ``max(nv[C] + mv[C])`` over the children ``C`` (0 for leaves).

The load in slot ``t`` is the sum of ``nv`` along the root-to-leaf path of ``t``.
The records live in two flat lists indexed by the 1-based layout of
:mod:`advtree.layout`; position 0 is unused.
"""

from __future__ import annotations

from typing import NamedTuple

from .config import BandwidthOverflowError, Interval, RangeError, TreeConfig
from .layout import LevelTable, level_table


class Violation(NamedTuple):
    index: int
    level: int
    expected_mv: int
    found_mv: int


class Tree:
    """Advance-reservation tree with O(log n) insert, delete and range max.

    Mutations require exclusive access; concurrent :meth:`max_reserved` calls
    are fine while no mutation runs. ``touched`` holds the number of distinct
    node records read or written by the most recent operation.
    """

    def __init__(self, config: TreeConfig):
        self.config = config
        self.table: LevelTable = level_table(config)
        self.n = config.n
        self.levels = config.levels
        size = self.table.size
        self.nv = [0] * (size + 1)
        self.mv = [0] * (size + 1)
        # 1-based per-level tables, padded so that level l sits at position l.
        self._x = (0,) + config.divisors_X + (0,)
        self._sigma = (0,) + self.table.sigma + (size + 1,)
        self._slots = (0,) + self.table.slots_per_node + (0,)
        self._lo = config.word_min
        self._hi = config.word_max
        self.touched = 0
        # Bumped by every mutation; fingers use it to detect staleness.
        self.version = 0
        self._overflow = False

    # -- public operations --------------------------------------------------

    def insert(self, start: int, end: int, bandwidth: int) -> None:
        """Reserve ``bandwidth`` over slots ``[start, end)``."""
        self._check_interval(start, end)
        self._check_bandwidth(bandwidth)
        self._apply_checked(start, end, bandwidth)

    def delete(self, start: int, end: int, bandwidth: int) -> None:
        """Release a reservation previously made with the same arguments.

        The tree keeps no ledger, so deleting something never inserted is
        not detected; the slot loads simply go down.
        """
        self._check_interval(start, end)
        self._check_bandwidth(bandwidth)
        self._apply_checked(start, end, -bandwidth)

    def max_reserved(self, start: int, end: int) -> int:
        """Largest total reservation over any slot in ``[start, end)``."""
        self._check_interval(start, end)
        self.touched = 0
        return self._max(1, 1, 0, start, end)

    def insert_checked(self, start: int, end: int, bandwidth: int, capacity: int) -> bool:
        """Insert only if no slot in ``[start, end)`` would exceed ``capacity``.

        The check runs inside the insertion itself. At the first decomposition
        node that would overflow the capacity the descent stops and remembers
        that node; a cleanup pass then retraces the same route with the
        bandwidth negated up to (not including) the remembered node. A
        rejected call therefore leaves every record exactly as it was.
        """
        self._check_interval(start, end)
        self._check_bandwidth(bandwidth)
        if capacity < 0:
            raise ValueError(f"capacity must be non-negative, got {capacity}")
        self.touched = 0
        self._overflow = False
        mark = self._add(1, 1, 0, start, end, bandwidth, 0, capacity)
        if mark:
            self._cleanup(1, 1, 0, start, end, -bandwidth, mark)
            return False
        self.version += 1
        if self._overflow:
            self._undo_overflow(start, end, bandwidth)
        return True

    def audit(self) -> Violation | None:
        """Check the ``mv`` equation at every node, deepest level first.

        Returns the first violation found, or None when the tree is consistent.
        """
        nv, mv, x, sigma = self.nv, self.mv, self._x, self._sigma
        for j in range(sigma[self.levels], len(nv)):
            if mv[j] != 0:
                return Violation(j, self.levels, 0, mv[j])
        for level in range(self.levels - 1, 0, -1):
            k = x[level]
            child = sigma[level + 1]
            for j in range(sigma[level], sigma[level + 1]):
                expected = max(nv[c] + mv[c] for c in range(child, child + k))
                if mv[j] != expected:
                    return Violation(j, level, expected, mv[j])
                child += k
        return None

    def slot_load(self, slot: int) -> int:
        """Sum of ``nv`` along the root-to-leaf path of ``slot``."""
        if not 0 <= slot < self.n:
            raise RangeError(f"slot {slot} outside [0, {self.n})")
        total = 0
        j = 1
        for level in range(1, self.levels + 1):
            total += self.nv[j]
            if level < self.levels:
                offset = slot // self._slots[level + 1] - (j - self._sigma[level]) * self._x[level]
                j = self._sigma[level + 1] + (j - self._sigma[level]) * self._x[level] + offset
        return total

    def loads(self) -> list[int]:
        """All slot loads, computed top-down in one pass over the array."""
        acc = [self.nv[1]]
        for level in range(1, self.levels):
            k = self._x[level]
            first = self._sigma[level + 1]
            acc = [a + self.nv[first + i * k + c] for i, a in enumerate(acc) for c in range(k)]
        return acc

    def records(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Snapshot of ``(nv, mv)`` for indices 1..size."""
        return tuple(self.nv[1:]), tuple(self.mv[1:])

    def node_interval(self, level: int, index: int) -> Interval:
        size = self._slots[level]
        offset = index - self._sigma[level]
        return Interval(offset * size, (offset + 1) * size)

    # -- internals ------------------------------------------------------------

    def _check_interval(self, start: int, end: int) -> None:
        if not (0 <= start < end <= self.n):
            raise RangeError(f"interval [{start}, {end}) not inside [0, {self.n})")

    def _check_bandwidth(self, bandwidth: int) -> None:
        if bandwidth <= 0:
            raise ValueError(f"bandwidth must be positive, got {bandwidth}")
        if bandwidth > self._hi:
            raise BandwidthOverflowError(f"bandwidth {bandwidth} exceeds the {self.config.word_bits}-bit word")

    def _apply_checked(self, start: int, end: int, bandwidth: int) -> None:
        self.touched = 0
        self._overflow = False
        self._add(1, 1, 0, start, end, bandwidth, 0, None)
        self.version += 1
        if self._overflow:
            self._undo_overflow(start, end, bandwidth)

    def _undo_overflow(self, start: int, end: int, bandwidth: int) -> None:
        # Python ints never wrap, so the completed pass is exactly invertible.
        self._add(1, 1, 0, start, end, -bandwidth, 0, None)
        self._overflow = False
        raise BandwidthOverflowError(
            f"adding {bandwidth} over [{start}, {end}) leaves the {self.config.word_bits}-bit range"
        )

    def _children(self, level: int, j: int, node_start: int, start: int, end: int) -> tuple[int, int, int, int]:
        csize = self._slots[level + 1]
        first = self._sigma[level + 1] + (j - self._sigma[level]) * self._x[level]
        lo = (start - node_start) // csize
        hi = (end - 1 - node_start) // csize
        return first, csize, lo, hi

    def _order(self, node_start: int, csize: int, lo: int, hi: int, start: int, end: int) -> list[int]:
        """Children to visit: fully covered ones first, then edge parts largest first."""
        if lo == hi:
            return [lo]
        left_part = node_start + (lo + 1) * csize - start
        right_part = end - (node_start + hi * csize)
        full = list(range(lo + 1, hi))
        edges = []
        if left_part == csize:
            full.insert(0, lo)
        else:
            edges.append((left_part, lo))
        if right_part == csize:
            full.append(hi)
        else:
            edges.append((right_part, hi))
        edges.sort(key=lambda e: -e[0])
        return full + [c for _, c in edges]

    def _refresh_mv(self, j: int, first: int, k: int) -> None:
        nv, mv = self.nv, self.mv
        if k == 2:
            a = nv[first] + mv[first]
            b = nv[first + 1] + mv[first + 1]
            m = a if a >= b else b
        else:
            m = max(nv[c] + mv[c] for c in range(first, first + k))
        mv[j] = m
        total = nv[j] + m
        if m > self._hi or m < self._lo or total > self._hi or total < self._lo:
            self._overflow = True

    def _add(self, level: int, j: int, node_start: int, start: int, end: int,
             bandwidth: int, prefix: int, capacity: int | None) -> int:
        """Add ``bandwidth`` over ``[start, end)`` below node ``j``.

        ``prefix`` is the sum of ``nv`` over the strict ancestors of ``j``.
        Returns 0 on completion, or the index of the node where the capacity
        check failed (nothing below or after it has been modified).
        """
        self.touched += 1
        nv = self.nv
        if start == node_start and end == node_start + self._slots[level]:
            if capacity is not None and prefix + nv[j] + self.mv[j] + bandwidth > capacity:
                return j
            v = nv[j] + bandwidth
            nv[j] = v
            total = v + self.mv[j]
            if v > self._hi or v < self._lo or total > self._hi or total < self._lo:
                self._overflow = True
            return 0
        first, csize, lo, hi = self._children(level, j, node_start, start, end)
        below = prefix + nv[j]
        if capacity is None:
            order = range(lo, hi + 1)
        else:
            order = self._order(node_start, csize, lo, hi, start, end)
        for c in order:
            cs = node_start + c * csize
            mark = self._add(level + 1, first + c, cs, max(start, cs), min(end, cs + csize),
                             bandwidth, below, capacity)
            if mark:
                return mark
        k = self._x[level]
        self.touched += k - (hi - lo + 1)
        self._refresh_mv(j, first, k)
        return 0

    def _cleanup(self, level: int, j: int, node_start: int, start: int, end: int,
                 bandwidth: int, mark: int) -> bool:
        """Retrace an aborted checked insert, applying ``bandwidth`` until ``mark``.

        Returns True once the marked node has been reached.
        """
        self.touched += 1
        if j == mark:
            return True
        if start == node_start and end == node_start + self._slots[level]:
            self.nv[j] += bandwidth
            return False
        first, csize, lo, hi = self._children(level, j, node_start, start, end)
        stopped = False
        for c in self._order(node_start, csize, lo, hi, start, end):
            cs = node_start + c * csize
            if self._cleanup(level + 1, first + c, cs, max(start, cs), min(end, cs + csize), bandwidth, mark):
                stopped = True
                break
        k = self._x[level]
        self.touched += k - (hi - lo + 1)
        self._refresh_mv(j, first, k)
        return stopped

    def _max(self, level: int, j: int, node_start: int, start: int, end: int) -> int:
        self.touched += 1
        nv, mv = self.nv, self.mv
        if start == node_start and end == node_start + self._slots[level]:
            return nv[j] + mv[j]
        first, csize, lo, hi = self._children(level, j, node_start, start, end)
        if lo == hi:
            cs = node_start + lo * csize
            return nv[j] + self._max(level + 1, first + lo, cs, start, end)
        cs = node_start + lo * csize
        best = self._max(level + 1, first + lo, cs, start, cs + csize)
        for c in range(first + lo + 1, first + hi):
            v = nv[c] + mv[c]
            if v > best:
                best = v
        self.touched += hi - lo - 1
        cs = node_start + hi * csize
        v = self._max(level + 1, first + hi, cs, cs, end)
        if v > best:
            best = v
        return nv[j] + best


def build(config: TreeConfig) -> Tree:
    return Tree(config)


def audit(tree: Tree) -> Violation | None:
    return tree.audit()
