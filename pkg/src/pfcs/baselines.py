"""Reference replacement policies behind the same access()/relate() surface.

ARC follows Megiddo & Modha (FAST '03) case by case; LIRS follows Jiang &
Zhang (SIGMETRICS '02) with the stack pruning rule. Both can assert their
structural invariants after every access (``strict=True``).
"""

from __future__ import annotations

import math
from collections import OrderedDict

from pfcs.stats import SimStats


class _Policy:
    name = ""

    def __init__(self, capacity: int, strict: bool = False):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.strict = strict
        self.stats = SimStats()

    def relate(self, keys) -> None:
        """Baselines have no notion of relationships."""

    def report(self) -> SimStats:
        return SimStats(**{k: getattr(self.stats, k) for k in self.stats.__dataclass_fields__})

    def access(self, key: int) -> bool:
        hit = self._access(key)
        st = self.stats
        st.accesses += 1
        if hit:
            st.hits += 1
        else:
            st.misses += 1
        if self.strict:
            self.check()
        return hit

    def _access(self, key: int) -> bool:
        raise NotImplementedError

    def check(self) -> None:
        pass


class LRUCache(_Policy):
    name = "lru"

    def __init__(self, capacity: int, strict: bool = False):
        super().__init__(capacity, strict)
        self.order: OrderedDict[int, None] = OrderedDict()

    def _access(self, key):
        if key in self.order:
            self.order.move_to_end(key)
            return True
        if len(self.order) >= self.capacity:
            self.order.popitem(last=False)
            self.stats.evictions += 1
        self.order[key] = None
        return False

    def resident(self) -> set[int]:
        return set(self.order)

    def check(self):
        assert len(self.order) <= self.capacity


class ARCCache(_Policy):
    """Adaptive Replacement Cache. Lists are OrderedDicts with LRU at the front."""

    name = "arc"

    def __init__(self, capacity: int, strict: bool = False):
        super().__init__(capacity, strict)
        self.p = 0.0
        self.t1: OrderedDict[int, None] = OrderedDict()
        self.t2: OrderedDict[int, None] = OrderedDict()
        self.b1: OrderedDict[int, None] = OrderedDict()
        self.b2: OrderedDict[int, None] = OrderedDict()

    def _replace(self, key) -> None:
        t1 = len(self.t1)
        if t1 >= 1 and ((key in self.b2 and t1 == self.p) or t1 > self.p) or not self.t2:
            old, _ = self.t1.popitem(last=False)
            self.b1[old] = None
        else:
            old, _ = self.t2.popitem(last=False)
            self.b2[old] = None
        self.stats.evictions += 1

    def _access(self, x):
        c = self.capacity
        if x in self.t1:
            del self.t1[x]
            self.t2[x] = None
            return True
        if x in self.t2:
            self.t2.move_to_end(x)
            return True
        if x in self.b1:
            delta = 1 if len(self.b1) >= len(self.b2) else len(self.b2) / len(self.b1)
            self.p = min(float(c), self.p + delta)
            self._replace(x)
            del self.b1[x]
            self.t2[x] = None
            return False
        if x in self.b2:
            delta = 1 if len(self.b2) >= len(self.b1) else len(self.b1) / len(self.b2)
            self.p = max(0.0, self.p - delta)
            self._replace(x)
            del self.b2[x]
            self.t2[x] = None
            return False
        l1 = len(self.t1) + len(self.b1)
        total = l1 + len(self.t2) + len(self.b2)
        if l1 == c:
            if len(self.t1) < c:
                self.b1.popitem(last=False)
                self._replace(x)
            else:
                self.t1.popitem(last=False)
                self.stats.evictions += 1
        elif l1 < c and total >= c:
            if total == 2 * c:
                self.b2.popitem(last=False)
            self._replace(x)
        self.t1[x] = None
        return False

    def resident(self) -> set[int]:
        return set(self.t1) | set(self.t2)

    def check(self):
        c = self.capacity
        t1, t2, b1, b2 = len(self.t1), len(self.t2), len(self.b1), len(self.b2)
        assert t1 + t2 <= c, ("|T1|+|T2|", t1, t2)
        assert t1 + b1 <= c, ("|T1|+|B1|", t1, b1)
        assert t1 + t2 + b1 + b2 <= 2 * c, "directory > 2c"
        assert 0 <= self.p <= c, ("p", self.p)
        lists = (self.t1, self.t2, self.b1, self.b2)
        assert sum(map(len, lists)) == len(set().union(*lists)), "lists overlap"


_LIR, _HIR = 0, 1


class LIRSCache(_Policy):
    """LIRS with a recency stack S and a queue Q of resident HIR blocks.

    Both are OrderedDicts with the oldest entry first, so the stack bottom
    is ``next(iter(S))``.
    """

    name = "lirs"

    def __init__(self, capacity: int, hir_fraction: float = 0.01, strict: bool = False):
        super().__init__(capacity, strict)
        if capacity == 1:
            self.hir_cap = 0
        else:
            self.hir_cap = min(capacity - 1, max(1, math.ceil(hir_fraction * capacity)))
        self.lir_cap = capacity - self.hir_cap
        self.stack: OrderedDict[int, None] = OrderedDict()
        self.queue: OrderedDict[int, None] = OrderedDict()
        self.status: dict[int, int] = {}  # LIR / HIR for every block in S or Q
        self.resident_set: set[int] = set()
        self.n_lir = 0

    def _prune(self):
        s = self.stack
        while s:
            bottom = next(iter(s))
            if self.status.get(bottom) == _LIR:
                break
            del s[bottom]
            if bottom not in self.resident_set:
                del self.status[bottom]

    def _push(self, x):
        self.stack.pop(x, None)
        self.stack[x] = None

    def _demote_bottom_lir(self):
        bottom = next(iter(self.stack))
        del self.stack[bottom]
        self.status[bottom] = _HIR
        self.queue[bottom] = None
        self.n_lir -= 1
        self._prune()

    def _evict_hir(self):
        victim, _ = self.queue.popitem(last=False)
        self.resident_set.discard(victim)
        if victim not in self.stack:
            del self.status[victim]
        self.stats.evictions += 1

    def _access(self, x):
        st = self.status.get(x)
        if x in self.resident_set:
            if st == _LIR:
                was_bottom = next(iter(self.stack)) == x
                self._push(x)
                if was_bottom:
                    self._prune()
            elif x in self.stack:
                self._push(x)
                self.status[x] = _LIR
                self.n_lir += 1
                del self.queue[x]
                self._demote_bottom_lir()
            else:
                self._push(x)
                self.queue.move_to_end(x)
            return True

        # miss
        if self.n_lir < self.lir_cap and len(self.resident_set) < self.capacity:
            self.resident_set.add(x)
            self.status[x] = _LIR
            self.n_lir += 1
            self._push(x)
            return False
        if self.hir_cap == 0:
            # capacity 1: the lone LIR block simply gives way
            old = next(iter(self.stack))
            del self.stack[old]
            self.resident_set.discard(old)
            del self.status[old]
            self.n_lir -= 1
            self.stats.evictions += 1
            self._prune()
            self.resident_set.add(x)
            self.status[x] = _LIR
            self.n_lir += 1
            self._push(x)
            return False
        if len(self.queue) >= self.hir_cap:
            self._evict_hir()
        self.resident_set.add(x)
        if x in self.stack:
            self._push(x)
            self.status[x] = _LIR
            self.n_lir += 1
            self._demote_bottom_lir()
        else:
            self._push(x)
            self.status[x] = _HIR
            self.queue[x] = None
        return False

    def resident(self) -> set[int]:
        return set(self.resident_set)

    def check(self):
        lirs = {k for k, v in self.status.items() if v == _LIR}
        assert len(lirs) == self.n_lir <= self.lir_cap, ("LIR size", len(lirs), self.n_lir)
        assert lirs <= set(self.stack), "LIR block missing from stack"
        assert lirs <= self.resident_set
        assert set(self.queue) == self.resident_set - lirs, "Q != resident HIR"
        assert len(self.queue) <= self.hir_cap, "Q over HIR capacity"
        assert len(self.resident_set) <= self.capacity
        if self.stack:
            assert self.status[next(iter(self.stack))] == _LIR, "stack bottom is not LIR"
        assert set(self.status) == set(self.stack) | set(self.queue)


class SemanticPlaceholder:
    """Named slot for an embedding-based cache. Not implemented; reports absent."""

    name = "semantic"
    available = False


POLICIES = {
    "lru": LRUCache,
    "arc": ARCCache,
    "lirs": LIRSCache,
    "semantic": SemanticPlaceholder,
}
