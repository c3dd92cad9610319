"""Tree configuration, slot/interval types and named presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence


class ConfigError(ValueError):
    """Raised for an invalid divisor set or granularity."""


class RangeError(ValueError):
    """Raised when an interval, slot or timestamp falls outside the universe."""


class BandwidthOverflowError(OverflowError):
    """Raised when a bandwidth value would not fit the configured word."""


class Interval(NamedTuple):
    """Half-open slot range ``[start, end)``."""

    start: int
    end: int

    def __len__(self) -> int:
        return self.end - self.start

    def validate(self, n: int) -> "Interval":
        if not (0 <= self.start < self.end <= n):
            raise RangeError(f"interval [{self.start}, {self.end}) not inside [0, {n})")
        return self

    def contains(self, other: "Interval") -> bool:
        return self.start <= other.start and other.end <= self.end


class Reservation(NamedTuple):
    interval: Interval
    bandwidth: int


@dataclass(frozen=True)
class TreeConfig:
    """Shape of a tree: slot length, per-level branching factors and time origin.

    ``divisors[i]`` is the number of children of every node on level ``i + 1``
    (the root is level 1). An empty divisor list gives a single-leaf tree.
    """

    granularity_g: int = 1
    divisors_X: tuple[int, ...] = ()
    origin_S_M: int = 0
    word_bits: int = 64
    _n: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "divisors_X", tuple(int(x) for x in self.divisors_X))
        if self.granularity_g < 1:
            raise ConfigError(f"granularity must be positive, got {self.granularity_g}")
        if self.word_bits < 2:
            raise ConfigError("word_bits must be at least 2")
        for i, x in enumerate(self.divisors_X, start=1):
            if x < 2:
                raise ConfigError(f"divisor X_{i} = {x} is below 2")
        n = math.prod(self.divisors_X)
        # Index arithmetic must stay inside the signed word as well.
        if n * 2 > self.word_max:
            raise ConfigError(f"leaf count {n} overflows a {self.word_bits}-bit word")
        object.__setattr__(self, "_n", n)

    @property
    def levels(self) -> int:
        return len(self.divisors_X) + 1

    @property
    def n(self) -> int:
        return self._n

    @property
    def span(self) -> int:
        """Universe length |M| in time units."""
        return self._n * self.granularity_g

    @property
    def word_min(self) -> int:
        return -(1 << (self.word_bits - 1))

    @property
    def word_max(self) -> int:
        return (1 << (self.word_bits - 1)) - 1

    def slot_of(self, timestamp: int) -> int:
        offset = timestamp - self.origin_S_M
        if not 0 <= offset < self.span:
            raise RangeError(
                f"timestamp {timestamp} outside [{self.origin_S_M}, {self.origin_S_M + self.span})"
            )
        return offset // self.granularity_g

    def interval(self, start: int, end: int) -> Interval:
        return Interval(start, end).validate(self._n)


def slot_of(config: TreeConfig, timestamp: int) -> int:
    return config.slot_of(timestamp)


# 32 days of 5-minute slots: 2^10 * 3^2 = 9216 leaves.
PAPER_MONTH_DIVISORS = (2, 2, 2, 2, 2, 3, 2, 2, 2, 3, 2, 2)

PRESETS: dict[str, TreeConfig] = {
    "paper-month-5min": TreeConfig(granularity_g=300, divisors_X=PAPER_MONTH_DIVISORS),
    "binary-1024": TreeConfig(granularity_g=1, divisors_X=(2,) * 10),
}


def binary_config(levels_below_root: int, granularity_g: int = 1) -> TreeConfig:
    return TreeConfig(granularity_g=granularity_g, divisors_X=(2,) * levels_below_root)


def preset(name: str, granularity_g: int | None = None, origin: int = 0) -> TreeConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}") from None
    return TreeConfig(
        granularity_g=base.granularity_g if granularity_g is None else granularity_g,
        divisors_X=base.divisors_X,
        origin_S_M=origin,
    )


def make_config(divisors: Sequence[int], granularity_g: int = 1, origin: int = 0, word_bits: int = 64) -> TreeConfig:
    return TreeConfig(granularity_g=granularity_g, divisors_X=tuple(divisors), origin_S_M=origin, word_bits=word_bits)
