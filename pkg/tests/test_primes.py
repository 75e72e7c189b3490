import math

import hypothesis.strategies as st
import pytest
from hypothesis import given

from pfcs.levels import DEFAULT_LEVELS, Level
from pfcs.primes import PrimePool, PrimeRange, SegmentTooLarge, UnknownPrime, is_prime, sieve_primes


def naive_is_prime(n):
    if n < 2:
        return False
    return all(n % k for k in range(2, math.isqrt(n) + 1))


def test_first_primes():
    assert sieve_primes(2, 13) == [2, 3, 5, 7, 11, 13]


def test_l2_first_cells():
    assert sieve_primes(1009, 1013) == [1009, 1013]


def test_l1_range_holds_168_primes():
    oracle = [n for n in range(2, 998) if naive_is_prime(n)]
    got = sieve_primes(2, 997)
    assert len(got) == 168 and got == oracle


def test_sieve_matches_trial_division_below_1e5():
    oracle = [n for n in range(10**5 + 1) if naive_is_prime(n)]
    assert sieve_primes(2, 10**5) == oracle


@given(st.integers(2, 10**5), st.integers(0, 2000))
def test_sieve_windows(lo, width):
    assert sieve_primes(lo, lo + width) == [n for n in range(lo, lo + width + 1) if naive_is_prime(n)]


def test_sieve_empty_and_oversized():
    with pytest.raises(ValueError):
        sieve_primes(10, 5)
    with pytest.raises(ValueError):
        sieve_primes(1, 5)
    with pytest.raises(SegmentTooLarge):
        sieve_primes(2, 10**8)


def test_sieve_above_base_table():
    lo = 10**16
    assert sieve_primes(lo, lo + 200) == [n for n in range(lo, lo + 201) if is_prime(n)]


@pytest.mark.parametrize("n,want", [(997, True), (1, False), (99991, True), (0, False), (2, True), (561, False)])
def test_is_prime_examples(n, want):
    assert is_prime(n) is want
    if n < 10**6:
        assert naive_is_prime(n) is want


@given(st.integers(0, 2 * 10**6))
def test_is_prime_matches_trial_division(n):
    assert is_prime(n) == naive_is_prime(n)


def test_is_prime_strong_pseudoprimes():
    # strong pseudoprimes to several small bases
    for n in (3215031751, 3825123056546413051, 318665857834031151167461):
        assert not is_prime(n)
    assert is_prime(2**61 - 1) and is_prime(2**89 - 1) and is_prime(2**127 - 1)
    assert not is_prime((2**61 - 1) * (2**89 - 1))


@given(st.integers(2, 10**6), st.integers(2, 10**6))
def test_products_are_composite(a, b):
    assert not is_prime(a * b)


def l1_pool():
    return PrimePool(Level.L1, DEFAULT_LEVELS[Level.L1].prime_range)


def test_fresh_pool_gives_2_then_ascending():
    pool = l1_pool()
    assert [pool.allocate() for _ in range(3)] == [2, 3, 5]


def test_bounded_pool_exhausts():
    pool = PrimePool(Level.L1, PrimeRange(2, 13))
    got = [pool.allocate() for _ in range(6)]
    assert got == [2, 3, 5, 7, 11, 13]
    assert pool.allocate() is None
    assert pool.free == []


def test_recycle_full_pool_of_ten():
    pool = PrimePool(Level.L1, PrimeRange(2, 29))
    for _ in range(10):
        pool.allocate()
    assert pool.recycle_count() == 1
    assert pool.recycle_lru(pool.recycle_count()) == [2]
    assert pool.allocate() == 2


def test_recycle_empty_allocated():
    assert l1_pool().recycle_lru(3) == []


def test_touch_changes_recycle_order():
    pool = l1_pool()
    pool.allocate(), pool.allocate()
    pool.touch(2)
    assert pool.recycle_lru(1) == [3]


def test_touch_unknown_prime():
    with pytest.raises(UnknownPrime):
        l1_pool().touch(7919)


@given(st.lists(st.integers(0, 19), max_size=60), st.integers(1, 20))
def test_recycle_order_matches_ordinal_replay(touches, count):
    pool = l1_pool()
    primes = [pool.allocate() for _ in range(20)]
    last = {p: i for i, p in enumerate(primes)}
    clock = len(primes)
    for t in touches:
        pool.touch(primes[t])
        last[primes[t]] = clock
        clock += 1
    want = sorted(primes, key=lambda p: (last[p], p))[:count]
    assert pool.recycle_lru(count) == want


def test_recycle_ties_go_to_smaller_prime():
    pool = l1_pool()
    for _ in range(5):
        pool.allocate()
    ords = {2: 4, 3: 1, 5: 1, 7: 2, 11: 1}
    pool.allocated.update(ords)
    assert pool.recycle_lru(4) == [3, 5, 11, 7]


def test_levels_never_share_primes():
    pools = [PrimePool(lc.level, lc.prime_range) for lc in DEFAULT_LEVELS]
    seen = set()
    for i in range(10**4):
        # L1 holds only 168 primes, so it takes part until it runs dry
        pool = pools[i % 4] if i < 4 * 168 else pools[1 + i % 3]
        p = pool.allocate()
        assert p is not None
        assert p not in seen
        seen.add(p)
    for a in DEFAULT_LEVELS:
        for b in DEFAULT_LEVELS:
            if a is not b:
                assert not a.prime_range.overlaps(b.prime_range)


def test_memory_pool_starts_at_range_floor():
    pool = PrimePool(Level.MEMORY, DEFAULT_LEVELS[Level.MEMORY].prime_range)
    assert pool.allocate() == 10000019


@given(st.lists(st.sampled_from(["alloc", "recycle", "touch"]), max_size=200))
def test_conservation_in_bounded_range(ops):
    pool = PrimePool(Level.L1, PrimeRange(2, 997), segment=128)
    while pool.allocate() is not None:
        pass
    total = len(pool)
    assert total == 168
    for p in list(pool.allocated):
        pool.release(p)
    for op in ops:
        if op == "alloc":
            pool.allocate()
        elif op == "recycle" and pool.allocated:
            pool.recycle_lru(pool.recycle_count())
        elif op == "touch" and pool.allocated:
            pool.touch(min(pool.allocated))
        assert len(pool.free) + len(pool.allocated) == total


def test_ascending_allocation_across_segments():
    pool = PrimePool(Level.L2, DEFAULT_LEVELS[Level.L2].prime_range, segment=1000)
    got = [pool.allocate() for _ in range(2000)]
    assert got == sorted(got) and len(set(got)) == 2000
    assert got == sieve_primes(1009, 99991)[:2000]
