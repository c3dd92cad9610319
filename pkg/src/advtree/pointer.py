"""Reference tree with explicit child references and stored intervals.

Same operations as :class:`advtree.tree.Tree`, written the obvious way: every
node object keeps its interval and a list of children. Used to check that the
flat, index-computed layout behaves identically.
"""

from __future__ import annotations

from typing import Sequence


class Node:
    __slots__ = ("start", "end", "nv", "mv", "children")

    def __init__(self, start: int, end: int):
        self.start = start
        self.end = end
        self.nv = 0
        self.mv = 0
        self.children: list[Node] = []


class PointerTree:
    def __init__(self, divisors: Sequence[int]):
        n = 1
        for x in divisors:
            n *= x
        self.n = n
        self.root = Node(0, n)
        frontier = [self.root]
        for x in divisors:
            nxt = []
            for node in frontier:
                step = (node.end - node.start) // x
                node.children = [Node(node.start + i * step, node.start + (i + 1) * step) for i in range(x)]
                nxt.extend(node.children)
            frontier = nxt

    def _add(self, node: Node, start: int, end: int, bw: int) -> None:
        if node.start == start and node.end == end:
            node.nv += bw
            return
        for child in node.children:
            s, e = max(start, child.start), min(end, child.end)
            if s < e:
                self._add(child, s, e, bw)
        node.mv = max(c.nv + c.mv for c in node.children)

    def insert(self, start: int, end: int, bw: int) -> None:
        self._add(self.root, start, end, bw)

    def delete(self, start: int, end: int, bw: int) -> None:
        self._add(self.root, start, end, -bw)

    def _max(self, node: Node, start: int, end: int) -> int:
        if node.start == start and node.end == end:
            return node.nv + node.mv
        best = None
        for child in node.children:
            s, e = max(start, child.start), min(end, child.end)
            if s < e:
                v = self._max(child, s, e)
                best = v if best is None else max(best, v)
        return node.nv + best

    def max_reserved(self, start: int, end: int) -> int:
        return self._max(self.root, start, end)

    def insert_checked(self, start: int, end: int, bw: int, capacity: int) -> bool:
        if self.max_reserved(start, end) + bw > capacity:
            return False
        self.insert(start, end, bw)
        return True

    def records(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(nv, mv) in level order, comparable with ``Tree.records()``."""
        nvs, mvs = [], []
        frontier = [self.root]
        while frontier:
            nvs.extend(node.nv for node in frontier)
            mvs.extend(node.mv for node in frontier)
            frontier = [c for node in frontier for c in node.children]
        return tuple(nvs), tuple(mvs)
