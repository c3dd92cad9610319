"""Segment tree for advance reservations of a limited resource over slotted time."""

from .config import (
    PRESETS,
    BandwidthOverflowError,
    ConfigError,
    Interval,
    RangeError,
    Reservation,
    TreeConfig,
    make_config,
    preset,
    slot_of,
)
from .finger import Finger, StaleFingerError, invalidate, query_with_finger
from .layout import LevelTable, child_index, level_table, node_interval
from .oracle import SlotOracle, WorkloadSpec, differential_run, generate, oracle_apply
from .tree import Tree, Violation, audit, build
from .window import HorizonError, PastIntervalError, WrappingWindow

__all__ = [
    "PRESETS", "BandwidthOverflowError", "ConfigError", "Interval", "RangeError", "Reservation",
    "TreeConfig", "make_config", "preset", "slot_of",
    "Finger", "StaleFingerError", "invalidate", "query_with_finger",
    "LevelTable", "child_index", "level_table", "node_interval",
    "SlotOracle", "WorkloadSpec", "differential_run", "generate", "oracle_apply",
    "Tree", "Violation", "audit", "build",
    "HorizonError", "PastIntervalError", "WrappingWindow",
]
