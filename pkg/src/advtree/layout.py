"""Pointer-free index arithmetic for the level-ordered node array.

Nodes are numbered from 1, level by level (heap order). Level ``l`` (1-based,
root = 1) starts at index ``sigma[l]`` and every node on it covers
``slots_per_node[l]`` consecutive slots. The tables below are stored as plain
tuples, so level ``l`` lives at tuple position ``l - 1``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .config import Interval, RangeError, TreeConfig


@dataclass(frozen=True)
class LevelTable:
    divisors: tuple[int, ...]
    delta: tuple[int, ...]
    sigma: tuple[int, ...]
    slots_per_node: tuple[int, ...]

    @property
    def levels(self) -> int:
        return len(self.delta)

    @property
    def size(self) -> int:
        """Total number of nodes, i.e. the last index of the array."""
        return self.delta[-1]

    @property
    def n(self) -> int:
        return self.slots_per_node[0]

    def nodes_on_level(self, level: int) -> int:
        return self.delta[level - 1] - self.sigma[level - 1] + 1

    def level_of(self, index: int) -> int:
        if not 1 <= index <= self.size:
            raise RangeError(f"node index {index} outside 1..{self.size}")
        return bisect.bisect_right(self.sigma, index)


def level_table(config: TreeConfig | tuple[int, ...] | list[int]) -> LevelTable:
    divisors = tuple(config.divisors_X) if isinstance(config, TreeConfig) else tuple(config)
    levels = len(divisors) + 1

    delta = [1]
    width = 1
    for x in divisors:
        width *= x
        delta.append(delta[-1] + width)
    sigma = [1] + [d + 1 for d in delta[:-1]]

    # Built bottom-up with multiplications only.
    slots = [1] * levels
    for l in range(levels - 2, -1, -1):
        slots[l] = slots[l + 1] * divisors[l]

    return LevelTable(divisors, tuple(delta), tuple(sigma), tuple(slots))


def _check_node(table: LevelTable, level: int, node: int) -> None:
    if not 1 <= level <= table.levels:
        raise RangeError(f"level {level} outside 1..{table.levels}")
    first = table.sigma[level - 1]
    if not first <= node <= table.delta[level - 1]:
        raise RangeError(f"node {node} not on level {level} ({first}..{table.delta[level - 1]})")


def child_index(table: LevelTable, level: int, node: int, c: int) -> int:
    """Flat index of the ``c``-th child (0-based) of ``node`` on ``level``."""
    _check_node(table, level, node)
    if level == table.levels:
        raise RangeError(f"level {level} is the leaf level")
    x = table.divisors[level - 1]
    if not 0 <= c < x:
        raise RangeError(f"child ordinal {c} outside 0..{x - 1}")
    return table.sigma[level] + (node - table.sigma[level - 1]) * x + c


def node_interval(table: LevelTable, level: int, node: int) -> Interval:
    _check_node(table, level, node)
    size = table.slots_per_node[level - 1]
    offset = node - table.sigma[level - 1]
    return Interval(offset * size, (offset + 1) * size)
