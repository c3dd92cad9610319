"""Restarting range-max queries from inside the tree.

A :class:`Finger` remembers the root-to-split-node path of the previous query
together with the running ``nv`` sums above each node on it. The next query
binary-searches that path for the deepest node whose interval still covers both
the old and the new interval, and resumes the descent there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .config import Interval
from .tree import Tree


class StaleFingerError(RuntimeError):
    """The tree was mutated (or replaced) since the finger was taken."""


class PathEntry(NamedTuple):
    level: int
    index: int
    prefix_nv: int  # sum of nv over the strict ancestors


@dataclass(frozen=True)
class Finger:
    last_interval: Interval | None = None
    path: tuple[PathEntry, ...] = ()
    valid: bool = False
    tree_version: int = -1
    tree_id: int = 0
    # Containment tests spent by the level search of the query that produced this finger.
    probes: int = 0
    restart: PathEntry | None = field(default=None, compare=False)

    @classmethod
    def empty(cls) -> "Finger":
        return cls()


def invalidate(finger: Finger) -> Finger:
    if not finger.valid:
        return finger
    return Finger(last_interval=finger.last_interval, path=finger.path, valid=False,
                  tree_version=finger.tree_version, tree_id=finger.tree_id)


def is_stale(tree: Tree, finger: Finger) -> bool:
    return finger.valid and (finger.tree_id != id(tree) or finger.tree_version != tree.version)


def _search(tree: Tree, path: tuple[PathEntry, ...], merged: Interval) -> tuple[int, int]:
    """Deepest path position whose node covers ``merged``, plus the probe count.

    Containment is monotone along the path (true for a prefix, false after),
    and the root at position 0 always covers everything.
    """
    lo, hi = 0, len(path) - 1
    probes = 0
    while lo < hi:
        mid = (lo + hi + 1) // 2
        e = path[mid]
        probes += 1
        if tree.node_interval(e.level, e.index).contains(merged):
            lo = mid
        else:
            hi = mid - 1
    return lo, probes


def _descend(tree: Tree, entry: PathEntry, start: int, end: int) -> tuple[int, list[PathEntry]]:
    """Query ``[start, end)`` from ``entry``; return the value and the path walked.

    The path runs down to the first node where the interval matches exactly or
    splits across several children; that node is included.
    """
    level, j, prefix = entry
    node_start = tree.node_interval(level, j).start
    walked = []
    nv = tree.nv
    while True:
        walked.append(PathEntry(level, j, prefix))
        size = tree._slots[level]
        if (start == node_start and end == node_start + size) or level == tree.levels:
            break
        csize = tree._slots[level + 1]
        lo = (start - node_start) // csize
        hi = (end - 1 - node_start) // csize
        if lo != hi:
            break
        tree.touched += 1
        prefix += nv[j]
        j = tree._sigma[level + 1] + (j - tree._sigma[level]) * tree._x[level] + lo
        node_start += lo * csize
        level += 1
    # _max counts the split node itself.
    return prefix + tree._max(level, j, node_start, start, end), walked


def query_with_finger(tree: Tree, finger: Finger, start: int, end: int) -> tuple[int, Finger]:
    """Range max over ``[start, end)``, restarting from the finger when possible.

    An empty or invalidated finger falls back to a walk from the root. A finger
    that is still marked valid but predates a mutation raises
    :class:`StaleFingerError`; callers should invalidate it and retry.
    """
    tree._check_interval(start, end)
    if is_stale(tree, finger):
        raise StaleFingerError("finger predates the last mutation of this tree")
    tree.touched = 0
    q = Interval(start, end)
    if finger.valid and finger.path:
        last = finger.last_interval
        merged = Interval(min(last.start, start), max(last.end, end))
        pos, probes = _search(tree, finger.path, merged)
        keep = finger.path[:pos]
        restart = finger.path[pos]
    else:
        probes = 0
        keep = ()
        restart = PathEntry(1, 1, 0)
    value, walked = _descend(tree, restart, start, end)
    new = Finger(last_interval=q, path=keep + tuple(walked), valid=True,
                 tree_version=tree.version, tree_id=id(tree), probes=probes, restart=restart)
    return value, new
