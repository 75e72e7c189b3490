"""Inclusive three-level cache simulator running the prime-factorization policy.

L1 is a subset of L2, which is a subset of L3; memory backs everything, so
an access hits when the element is resident anywhere in L1..L3. Hits
below L1 promote. After every access the element's relation groups are
factorized (cached) and the other members are prefetched into the level
their prime range points at.

Replacement inside a level picks the smallest key
``(never-used prefetch first, relation degree, last access)``, ties going
to the smaller element id; with no relations and no prefetching this is
plain LRU.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

from pfcs.assignment import AssignmentConfig, AssignmentFailure, AssignmentTable
from pfcs.factorizer import DEFAULT_CACHE_CAPACITY, Factorizer
from pfcs.levels import CACHE_LEVELS, DEFAULT_LEVELS, Level, LevelConfig
from pfcs.relations import DEFAULT_ARITY_CAP, RelationRegistry
from pfcs.stats import SimStats

DEFAULT_PREFETCH_CAP = 8


@dataclass(frozen=True)
class CacheConfig:
    levels: tuple[LevelConfig, ...] = DEFAULT_LEVELS
    prefetch_cap: int = DEFAULT_PREFETCH_CAP
    arity_cap: int = DEFAULT_ARITY_CAP
    assignment: AssignmentConfig = field(default_factory=AssignmentConfig)
    fcache_capacity: int = DEFAULT_CACHE_CAPACITY
    seed: int = 0

    def __post_init__(self):
        if self.prefetch_cap < 0:
            raise ValueError("prefetch cap must be non-negative")


class CacheEntry:
    __slots__ = ("element", "last_access", "prefetched")

    def __init__(self, element: int, last_access: int, prefetched: bool = False):
        self.element = element
        self.last_access = last_access
        self.prefetched = prefetched  # filled by prefetch, no demand access yet


class _LevelStore:
    """Resident set of one level with a lazily-invalidated min-heap of keys."""

    def __init__(self, level: Level, capacity: int):
        self.level = level
        self.capacity = capacity
        self.resident: dict[int, tuple] = {}
        self._heap: list[tuple[tuple, int]] = []

    def __contains__(self, d: int) -> bool:
        return d in self.resident

    def __len__(self):
        return len(self.resident)

    def set(self, d: int, key: tuple) -> None:
        if self.resident.get(d) == key:
            return
        self.resident[d] = key
        heapq.heappush(self._heap, (key, d))
        if len(self._heap) > 4 * self.capacity + 64:
            self._heap = [(k, e) for e, k in self.resident.items()]
            heapq.heapify(self._heap)

    def remove(self, d: int) -> None:
        self.resident.pop(d, None)

    def victim(self, skip: Callable[[tuple], bool] | None = None) -> int | None:
        heap = self._heap
        held = []
        found = None
        while heap:
            key, d = heap[0]
            if self.resident.get(d) != key:
                heapq.heappop(heap)
                continue
            if skip is not None and skip(key):
                held.append(heapq.heappop(heap))
                continue
            found = d
            break
        for item in held:
            heapq.heappush(heap, item)
        return found


class PFCSCache:
    name = "pfcs"

    def __init__(self, config: CacheConfig = CacheConfig()):
        self.config = config
        self.table = AssignmentTable(config.levels, config.assignment)
        self.factorizer = Factorizer(config.fcache_capacity, seed=config.seed)
        self.registry = RelationRegistry(self.table, self.factorizer, config.arity_cap)
        self.registry.on_change(self._rekey_all)
        self.stores = [_LevelStore(lv, config.levels[lv].capacity) for lv in CACHE_LEVELS]
        self.entries: dict[int, CacheEntry] = {}
        self.stats = SimStats()
        self.tick = 0
        self.prefetch_hooks: list[Callable[[int, int], None]] = []

    # -- trace interface ---------------------------------------------------

    def access(self, d: int) -> bool:
        return self.lookup(d)

    def relate(self, keys: Iterable[int]) -> int:
        now = self._next_tick()
        keys = list(keys)
        for _ in range(len(keys) + 1):
            for k in keys:
                self.table.assign_prime(k, now, pending_relations=1)
            # recycling inside a later assignment can strip an earlier member
            if all(self.table.prime_of(k) is not None for k in keys):
                break
        else:
            raise AssignmentFailure(f"could not keep primes for group {keys}")
        return self.registry.register_group(keys, now)

    def report(self) -> SimStats:
        return replace(self.stats)

    # -- core operations -----------------------------------------------------

    def lookup(self, d: int) -> bool:
        now = self._next_tick()
        st = self.stats
        st.accesses += 1
        self.table.record_access(d, now)
        served = self.level_of(d)
        if served is not Level.MEMORY:
            st.hits += 1
            e = self.entries[d]
            if e.prefetched:
                e.prefetched = False
                st.prefetch_used += 1
            e.last_access = now
            self._rekey(d)
            for lv in reversed(range(served)):
                self._insert(lv, d, now)
        else:
            st.misses += 1
            self.entries[d] = CacheEntry(d, now)
            for lv in reversed(CACHE_LEVELS):
                self._insert(lv, d, now)
        self.table.assign_prime(d, now, level=served)
        self._prefetch(d, served, now)
        return served is not Level.MEMORY

    def prefetch(self, d: int) -> list[int]:
        """Prefetch d's relatives as if d had just been served where it sits."""
        return self._prefetch(d, self.level_of(d), self.tick)

    def evict(self, level: Level) -> int | None:
        """Evict one entry from ``level`` by the replacement rule."""
        v = self.stores[level].victim()
        if v is not None:
            self._evict_from(level, v)
        return v

    def level_of(self, d: int) -> Level:
        for store in self.stores:
            if d in store:
                return store.level
        return Level.MEMORY

    def resident(self, level: Level = Level.L3) -> set[int]:
        return set(self.stores[level].resident)

    def eviction_key(self, d: int) -> tuple:
        e = self.entries[d]
        return (0 if e.prefetched else 1, self.table.rel_count.get(d, 0), e.last_access)

    # -- internals -----------------------------------------------------------

    def _next_tick(self) -> int:
        self.tick += 1
        return self.tick

    def _rekey(self, d: int) -> None:
        key = self.eviction_key(d)
        for store in self.stores:
            if d in store:
                store.set(d, key)

    def _rekey_all(self, members) -> None:
        for m in members:
            if m in self.entries:
                self._rekey(m)

    def _insert(self, lv: int, d: int, now: int, prefetch: bool = False) -> bool:
        store = self.stores[lv]
        if d in store:
            store.set(d, self.eviction_key(d))
            return True
        # a prefetch never displaces anything touched at this tick
        skip = (lambda key: key[2] >= now) if prefetch else None
        while len(store) >= store.capacity:
            v = store.victim(skip)
            if v is None:
                return False
            self._evict_from(lv, v)
        store.set(d, self.eviction_key(d))
        return True

    def _evict_from(self, lv: int, d: int) -> None:
        # inclusion: leaving a level means leaving every level above it
        for i in range(lv, -1, -1):
            self.stores[i].remove(d)
        if lv == Level.L3:
            del self.entries[d]
            self.stats.evictions += 1

    def _prefetch(self, d: int, served: Level, now: int) -> list[int]:
        cap = self.config.prefetch_cap
        p = self.table.prime_of(d)
        if p is None or cap == 0:
            return []
        st = self.stats
        budget = self.table.budget(served)
        fetched: list[int] = []
        for group in self.registry.related_groups(p):
            if len(fetched) >= cap:
                break
            found = self.registry.discover(group.composite, budget)
            st.factorizations += 1
            if not found.complete:
                st.budget_exhaustions += 1
                continue
            for m in sorted(found.elements, key=self.table.data_to_prime.__getitem__):
                if m == d or m in self.entries:
                    continue
                if self._place_prefetch(m, now):
                    fetched.append(m)
                    st.prefetch_issued += 1
                    for hook in self.prefetch_hooks:
                        hook(d, m)
                    if len(fetched) >= cap:
                        break
        return fetched

    def _place_prefetch(self, m: int, now: int) -> bool:
        target = min(self.table.level_of_prime(self.table.data_to_prime[m]), Level.L3)
        self.entries[m] = CacheEntry(m, now, prefetched=True)
        if not self._insert(Level.L3, m, now, prefetch=True):
            del self.entries[m]
            return False
        for lv in (Level.L2, Level.L1):
            if lv >= target:
                self._insert(lv, m, now, prefetch=True)
        return True

    def check(self) -> None:
        """Assert capacity, inclusion and bookkeeping invariants."""
        l1, l2, l3 = self.stores
        for store in self.stores:
            assert len(store) <= store.capacity, store.level
        assert set(l1.resident) <= set(l2.resident) <= set(l3.resident)
        assert set(self.entries) == set(l3.resident)
        st = self.stats
        assert st.hits + st.misses == st.accesses
        assert st.prefetch_used <= st.prefetch_issued
