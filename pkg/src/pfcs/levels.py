"""Cache levels and their default prime ranges, capacities and step budgets."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from pfcs.primes import PrimeRange


class Level(IntEnum):
    L1 = 0
    L2 = 1
    L3 = 2
    MEMORY = 3

    @classmethod
    def parse(cls, name: str | int) -> Level:
        if isinstance(name, int):
            return cls(name)
        return cls[name.upper()]


CACHE_LEVELS = (Level.L1, Level.L2, Level.L3)


@dataclass(frozen=True)
class LevelConfig:
    level: Level
    prime_range: PrimeRange
    budget: int
    capacity: int | None = None  # None only for the backing memory level

    def __post_init__(self):
        if self.level is not Level.MEMORY and (self.capacity is None or self.capacity < 1):
            raise ValueError(f"{self.level.name} needs capacity >= 1")
        if self.budget < 0:
            raise ValueError("step budget must be non-negative")

    def to_dict(self) -> dict:
        return {
            "level": self.level.name,
            "capacity": self.capacity,
            "prime_lo": self.prime_range.lo,
            "prime_hi": self.prime_range.hi,
            "budget": self.budget,
        }

    @classmethod
    def from_dict(cls, d: dict) -> LevelConfig:
        return cls(
            level=Level.parse(d["level"]),
            prime_range=PrimeRange(int(d["prime_lo"]), None if d.get("prime_hi") is None else int(d["prime_hi"])),
            budget=int(d["budget"]),
            capacity=None if d.get("capacity") is None else int(d["capacity"]),
        )


DEFAULT_LEVELS = (
    LevelConfig(Level.L1, PrimeRange(2, 997), budget=0, capacity=64),
    LevelConfig(Level.L2, PrimeRange(1009, 99991), budget=10**3, capacity=512),
    LevelConfig(Level.L3, PrimeRange(100003, 9999991), budget=10**5, capacity=4096),
    LevelConfig(Level.MEMORY, PrimeRange(10000019), budget=10**6),
)


def check_levels(levels) -> None:
    """Raise ValueError unless levels cover L1..MEMORY once each with disjoint ranges."""
    got = [lc.level for lc in levels]
    if got != list(Level):
        raise ValueError(f"expected levels {[lv.name for lv in Level]}, got {[lv.name for lv in got]}")
    for i, a in enumerate(levels):
        for b in levels[i + 1 :]:
            if a.prime_range.overlaps(b.prime_range):
                raise ValueError(f"prime ranges of {a.level.name} and {b.level.name} overlap")
