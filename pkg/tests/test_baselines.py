import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from pfcs.baselines import POLICIES, ARCCache, LIRSCache, LRUCache, SemanticPlaceholder
from pfcs.workloads import WorkloadSpec, generate


class NaiveLRU:
    def __init__(self, capacity):
        self.capacity = capacity
        self.items = []

    def access(self, k):
        if k in self.items:
            self.items.remove(k)
            self.items.append(k)
            return True
        if len(self.items) >= self.capacity:
            self.items.pop(0)
        self.items.append(k)
        return False


def test_lru_hand_trace():
    lru = LRUCache(2)
    hits = [lru.access(k) for k in "abacb"]
    assert hits == [False, False, True, False, False]
    assert lru.resident() == {"c", "b"}


def test_lru_matches_naive_list_scan():
    rng = random.Random(5)
    for cap in (1, 3, 17, 64):
        lru, naive = LRUCache(cap), NaiveLRU(cap)
        for _ in range(10**4):
            k = rng.randrange(100)
            assert lru.access(k) == naive.access(k)


def test_arc_ghost_hit_in_b1_raises_p():
    arc = ARCCache(2, strict=True)
    for k in (1, 1, 2, 3):  # 1 sits in T2, so REPLACE pushes 2 to B1
        arc.access(k)
    assert 2 in arc.b1 and arc.p == 0
    assert arc.access(2) is False
    assert arc.p > 0 and 2 in arc.t2


@pytest.mark.parametrize("cls", [LRUCache, ARCCache, LIRSCache])
def test_repeated_key_hits_after_first(cls):
    pol = cls(4, strict=True)
    assert [pol.access(9) for _ in range(5)] == [False] + [True] * 4


@pytest.mark.parametrize("cls", [ARCCache, LIRSCache])
@given(st.lists(st.integers(0, 40), max_size=400), st.integers(1, 20))
def test_strict_invariants_hold(cls, trace, cap):
    pol = cls(cap, strict=True)
    for k in trace:
        pol.access(k)
    assert len(pol.resident()) <= cap


def test_lirs_small_trace():
    # capacity 3: two LIR blocks and one resident HIR block
    lirs = LIRSCache(3, strict=True)
    assert lirs.lir_cap == 2 and lirs.hir_cap == 1
    for k in (1, 2, 3, 4):
        lirs.access(k)
    assert lirs.resident() == {1, 2, 4}
    assert lirs.access(3) is False  # 3 is non-resident HIR still in the stack
    assert lirs.status[3] == 0  # promoted to LIR on reuse distance


@pytest.mark.parametrize("cls", [LRUCache, ARCCache, LIRSCache])
def test_stats_recount(cls):
    rng = random.Random(1)
    pol = cls(10)
    hits = sum(pol.access(rng.randrange(30)) for _ in range(2000))
    s = pol.report()
    assert s.hits == hits and s.misses == 2000 - hits and s.accesses == 2000


def test_fresh_stats_zero():
    s = LRUCache(3).report()
    assert s.accesses == s.hits == s.misses == 0


def test_zipf_sanity_envelope():
    spec = WorkloadSpec("zipf", 10**4, 10**5, 0.99, seed=3)
    rates = {}
    for name in ("lru", "arc", "lirs"):
        pol = POLICIES[name](500)
        for ev in generate(spec):
            pol.access(ev.key)
        rates[name] = pol.report().hit_rate
    for name in ("arc", "lirs"):
        assert rates["lru"] - 0.02 <= rates[name] <= rates["lru"] + 0.20, rates


def test_semantic_slot_is_absent():
    assert POLICIES["semantic"] is SemanticPlaceholder and not SemanticPlaceholder.available


def test_capacity_must_be_positive():
    with pytest.raises(ValueError):
        LRUCache(0)
