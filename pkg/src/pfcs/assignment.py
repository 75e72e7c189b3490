"""Element -> prime assignment with frequency-driven range selection.

Assignment is sticky: once an element holds a prime it keeps it until
recycling takes it back. When a level's pool runs dry, the least recently
used tenth of its allocated primes are reclaimed, their elements unmapped
and every listener (the relation registry, the simulated cache) told.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from pfcs.levels import DEFAULT_LEVELS, Level, LevelConfig, check_levels
from pfcs.primes import DEFAULT_SEGMENT, PrimePool


class AssignmentFailure(RuntimeError):
    pass


@dataclass
class AccessStats:
    ewma: float = 0.0
    last_seen: int = 0


@dataclass(frozen=True)
class AssignmentConfig:
    alpha: float = 0.8
    f_hot: float = 4.0
    f_warm: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")
        if not self.f_hot > self.f_warm:
            raise ValueError("need f_hot > f_warm")


def predict_frequency(stats: AccessStats, now: int, alpha: float = 0.8) -> float:
    """EWMA access count decayed to ``now``."""
    return stats.ewma * alpha ** (now - stats.last_seen)


def select_range(freq: float, rel: int, budget: int | None = None, f_hot: float = 4.0, f_warm: float = 1.0) -> Level:
    # budget is accepted for symmetry with the level's factorization budget
    # but the cut points alone decide.
    if freq >= f_hot:
        return Level.L1
    if freq >= f_warm:
        return Level.L2
    return Level.L3 if rel > 0 else Level.MEMORY


RecycleListener = Callable[[int, int], None]


class AssignmentTable:
    """Bidirectional element/prime map plus one prime pool per level."""

    def __init__(
        self,
        levels: tuple[LevelConfig, ...] = DEFAULT_LEVELS,
        config: AssignmentConfig = AssignmentConfig(),
        segment: int = DEFAULT_SEGMENT,
    ):
        check_levels(levels)
        self.config = config
        self.levels = tuple(levels)
        self.pools = {lc.level: PrimePool(lc.level, lc.prime_range, segment) for lc in levels}
        self.data_to_prime: dict[int, int] = {}
        self.prime_to_data: dict[int, int] = {}
        self.stats: dict[int, AccessStats] = {}
        self.rel_count: dict[int, int] = {}
        self.recycled = 0
        self._listeners: list[RecycleListener] = []

    def on_recycle(self, fn: RecycleListener) -> None:
        """Register fn(prime, element), called after the mapping is dropped."""
        self._listeners.append(fn)

    def level_of_prime(self, p: int) -> Level:
        for lc in self.levels:
            if p in lc.prime_range:
                return lc.level
        raise ValueError(f"{p} lies in no level's prime range")

    def budget(self, level: Level) -> int:
        return self.levels[level].budget

    def prime_of(self, d: int) -> int | None:
        return self.data_to_prime.get(d)

    def element_of(self, p: int) -> int | None:
        return self.prime_to_data.get(p)

    def frequency(self, d: int, now: int) -> float:
        s = self.stats.get(d)
        return 0.0 if s is None else predict_frequency(s, now, self.config.alpha)

    def record_access(self, d: int, now: int) -> None:
        s = self.stats.get(d)
        if s is None:
            s = self.stats[d] = AccessStats()
        s.ewma = predict_frequency(s, now, self.config.alpha) + 1.0
        s.last_seen = now
        p = self.data_to_prime.get(d)
        if p is not None:
            self.pools[self.level_of_prime(p)].touch(p)

    def add_relations(self, d: int, delta: int) -> None:
        n = self.rel_count.get(d, 0) + delta
        if n < 0:
            raise ValueError(f"relation count for {d} would go negative")
        if n:
            self.rel_count[d] = n
        else:
            self.rel_count.pop(d, None)

    def assign_prime(self, d: int, now: int = 0, level: Level | None = None, pending_relations: int = 0) -> int:
        """Prime for element d, allocating one if d has none.

        ``level`` is the cache level asking (it fixes the factorization
        budget handed to range selection); ``pending_relations`` lets a caller
        that is about to register d in a group count that group already.
        """
        p = self.data_to_prime.get(d)
        if p is not None:
            return p
        cfg = self.config
        freq = self.frequency(d, now)
        rel = self.rel_count.get(d, 0) + pending_relations
        budget = self.budget(Level.MEMORY if level is None else level)
        target = select_range(freq, rel, budget, cfg.f_hot, cfg.f_warm)
        pool = self.pools[target]
        p = pool.allocate()
        if p is None:
            self._recycle(pool)
            p = pool.allocate()
            if p is None:
                raise AssignmentFailure(f"{target.name} pool has no primes even after recycling")
        self.data_to_prime[d] = p
        self.prime_to_data[p] = d
        return p

    def _recycle(self, pool: PrimePool) -> list[int]:
        reclaimed = pool.recycle_lru(pool.recycle_count())
        for p in reclaimed:
            d = self.prime_to_data.pop(p, None)
            if d is None:
                continue
            del self.data_to_prime[d]
            self.recycled += 1
            for fn in self._listeners:
                fn(p, d)
        return reclaimed

    def release_element(self, d: int) -> int | None:
        """Drop d's mapping in both directions. The pool is left to the caller."""
        p = self.data_to_prime.pop(d, None)
        if p is not None:
            del self.prime_to_data[p]
        return p

    def check(self) -> None:
        """Assert the bijection and pool-membership invariants."""
        assert len(self.data_to_prime) == len(self.prime_to_data)
        for d, p in self.data_to_prime.items():
            assert self.prime_to_data[p] == d
            owners = [lv for lv, pool in self.pools.items() if p in pool.allocated]
            assert len(owners) == 1, (p, owners)
