import math
import random

import hypothesis.strategies as st
import pytest
from hypothesis import given

from pfcs.assignment import AccessStats, AssignmentTable
from pfcs.factorizer import InvalidComposite
from pfcs.primes import is_prime
from pfcs.relations import ArityError, RelationRegistry, UnassignedMember


def pinned(primes):
    """Registry whose element i holds primes[i]."""
    t = AssignmentTable()
    for i, p in enumerate(primes):
        t.data_to_prime[i] = p
        t.prime_to_data[p] = i
    return t, RelationRegistry(t)


@pytest.mark.parametrize("primes,c", [((11, 13), 143), ((2, 3), 6), ((2, 3, 5), 30)])
def test_register_products(primes, c):
    t, reg = pinned(primes)
    assert reg.register_group(range(len(primes))) == c
    assert reg.groups[c].members == frozenset(range(len(primes)))


def test_register_is_idempotent():
    t, reg = pinned((2, 3))
    assert reg.register_group([0, 1]) == reg.register_group([1, 0]) == 6
    assert len(reg) == 1 and t.rel_count == {0: 1, 1: 1}


def test_register_errors():
    t, reg = pinned((2, 3, 5))
    with pytest.raises(ArityError):
        reg.register_group([0])
    with pytest.raises(ValueError):
        reg.register_group([0, 0])
    with pytest.raises(UnassignedMember):
        reg.register_group([0, 99])
    small = RelationRegistry(t, arity_cap=2)
    with pytest.raises(ArityError):
        small.register_group([0, 1, 2])


def test_discover_examples():
    t, reg = pinned((11, 13, 2, 3))
    found = reg.discover(143, 0)
    assert found.elements == {0, 1} and found.complete and not found.dangling
    assert reg.discover(6, 0).elements == {2, 3}
    assert reg.discover(13, 0).elements == {1}
    with pytest.raises(InvalidComposite):
        reg.discover(1, 10)


def test_discover_reports_dangling_factor():
    t, reg = pinned((11,))
    found = reg.discover(143, 0)
    assert found.elements == {0} and found.dangling == {13}


def test_related_composites():
    t, reg = pinned((2, 3, 5))
    reg.register_group([0, 1])
    reg.register_group([0, 2])
    assert reg.related_composites(2) == {6, 10}
    assert reg.related_composites(7) == set()


def test_related_groups_newest_first():
    t, reg = pinned((2, 3, 5, 7))
    for other in (1, 2, 3):
        reg.register_group([0, other])
    assert [g.composite for g in reg.related_groups(2)] == [14, 10, 6]


def test_purge_examples():
    t, reg = pinned((2, 3, 5))
    reg.register_group([0, 1])
    reg.register_group([0, 2])
    reg.register_group([1, 2])
    assert reg.purge_prime(2) == {6, 10}
    assert set(reg.groups) == {15}
    assert reg.purge_prime(97) == set()
    reg.check()
    for posting in reg.by_prime.values():
        assert posting <= set(reg.groups)
    assert t.rel_count == {1: 1, 2: 1}


def test_change_listener_sees_adds_and_removes():
    t, reg = pinned((2, 3))
    seen = []
    reg.on_change(seen.append)
    reg.register_group([0, 1])
    reg.purge_prime(3)
    assert seen == [frozenset({0, 1}), frozenset({0, 1})]


def build(n_elements, seed):
    rng = random.Random(seed)
    t = AssignmentTable()
    for d in range(n_elements):
        t.stats[d] = AccessStats(rng.choice((0.0, 2.0, 8.0)), 0)
        if t.stats[d].ewma >= 4 and len(t.pools[0].allocated) >= 160:
            t.stats[d] = AccessStats(2.0, 0)
        t.assign_prime(d, pending_relations=1)
    return rng, t, RelationRegistry(t)


@given(st.integers(0, 2**32), st.integers(1, 60))
def test_round_trip_and_index(seed, n_groups):
    rng, t, reg = build(300, seed)
    groups = {}
    for _ in range(n_groups):
        members = frozenset(rng.sample(range(300), rng.randint(2, 8)))
        groups[reg.register_group(members)] = members
    for c, members in groups.items():
        found = reg.discover(c, 10**6)
        assert found.complete and found.elements == members
        # squarefree: every prime factor appears once
        assert len(set(found.factorization.factors)) == len(found.factorization.factors)
    for p in {t.prime_of(d) for d in range(300)}:
        assert reg.related_composites(p) == {c for c in reg.groups if c % p == 0}
    reg.check()


def test_index_matches_divisibility_scan_at_scale():
    rng, t, reg = build(2000, 11)
    for _ in range(10**4):
        reg.register_group(rng.sample(range(2000), rng.randint(2, 4)))
    for d in rng.sample(range(2000), 200):
        p = t.prime_of(d)
        assert reg.related_composites(p) == {c for c in reg.groups if c % p == 0}
    for _ in range(50):
        reg.purge_prime(t.prime_of(rng.randrange(2000)))
    reg.check()
    for c, g in reg.groups.items():
        assert math.prod(g.primes) == c and all(is_prime(p) for p in g.primes)
