"""Prime generation, primality testing and per-level prime pools."""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

U64_MAX = 2**64 - 1

# Span cap for a single sieve_primes call. Pools extend lazily in much
# smaller segments (DEFAULT_SEGMENT).
MAX_SIEVE_SPAN = 10**7
DEFAULT_SEGMENT = 2**16

try:  # optional: gmpy2 makes modular exponentiation several times faster
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int

# (bound, witnesses): Miller-Rabin with these bases is exact for n < bound.
_MR_TIERS = (
    (1_373_653, (2, 3)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (3_825_123_056_546_413_051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318_665_857_834_031_151_167_461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3_317_044_064_679_887_385_961_981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
)
_MR_ROUNDS = 40
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class SegmentTooLarge(ValueError):
    pass


class UnknownPrime(KeyError):
    pass


def _miller_rabin(n: int, bases) -> bool:
    n = _mpz(n)
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(n: int) -> bool:
    """Primality test, deterministic for every n below 3.3e24 (so all of u64).

    Larger inputs use 40 Miller-Rabin rounds with bases drawn from an RNG
    seeded by n itself, so the answer is still reproducible.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 47 * 47:
        return True
    for bound, bases in _MR_TIERS:
        if n < bound:
            return _miller_rabin(n, bases)
    if not _miller_rabin(n, (2,)):
        return False
    rng = random.Random(n)
    return _miller_rabin(n, (rng.randrange(2, n - 1) for _ in range(_MR_ROUNDS)))


@lru_cache(maxsize=8)
def _base_primes(limit: int) -> np.ndarray:
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def _base_limit(hi: int) -> int:
    # Round the base-prime bound up so the lru_cache actually gets reused.
    r = math.isqrt(hi)
    return max(64, 1 << r.bit_length())


def sieve_primes(lo: int, hi: int, max_span: int = MAX_SIEVE_SPAN) -> list[int]:
    """All primes p with lo <= p <= hi, ascending (segmented sieve).

    >>> sieve_primes(2, 13)
    [2, 3, 5, 7, 11, 13]
    """
    if lo < 2 or lo > hi:
        raise ValueError(f"need 2 <= lo <= hi, got lo={lo} hi={hi}")
    if hi - lo > max_span:
        raise SegmentTooLarge(f"span {hi - lo} exceeds cap {max_span}")
    if hi > U64_MAX:
        raise ValueError("sieve limited to 64-bit values")
    limit = _base_limit(hi)
    if limit > 10**8:
        # base primes would not fit comfortably in memory; test directly
        return [n for n in range(lo, hi + 1) if is_prime(n)]
    base = _base_primes(limit)
    span = hi - lo + 1
    seg = np.ones(span, dtype=bool)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = max(p * p, ((lo + p - 1) // p) * p)
        if start > hi:
            continue
        seg[start - lo :: p] = False
    return [lo + int(i) for i in np.flatnonzero(seg)]


@dataclass(frozen=True)
class PrimeRange:
    """Inclusive range of prime values; ``hi=None`` means unbounded (capped at u64)."""

    lo: int
    hi: int | None = None

    def __post_init__(self):
        if self.lo < 2:
            raise ValueError("prime range must start at 2 or above")
        if self.hi is not None and self.hi < self.lo:
            raise ValueError(f"empty prime range {self.lo}..{self.hi}")

    @property
    def upper(self) -> int:
        return U64_MAX if self.hi is None else self.hi

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.upper

    def overlaps(self, other: PrimeRange) -> bool:
        return self.lo <= other.upper and other.lo <= self.upper

    def __str__(self):
        return f"{self.lo}-{'' if self.hi is None else self.hi}"


class PrimePool:
    """Allocates primes from one level's range, smallest first.

    Allocated primes carry a logical use-ordinal; ``recycle_lru`` hands back
    the ones with the oldest ordinals. The free set is materialised lazily,
    one sieve segment at a time.
    """

    def __init__(self, level, prime_range: PrimeRange, segment: int = DEFAULT_SEGMENT):
        self.level = level
        self.range = prime_range
        self.segment = segment
        self._free: list[int] = []
        self._free_set: set[int] = set()
        self.allocated: dict[int, int] = {}
        self.next_cursor = prime_range.lo
        self._clock = 0

    @property
    def free(self) -> list[int]:
        return sorted(self._free_set)

    @property
    def exhausted_range(self) -> bool:
        return self.next_cursor > self.range.upper

    def __len__(self):
        """Primes materialised so far (free + allocated)."""
        return len(self._free_set) + len(self.allocated)

    def _extend(self) -> bool:
        while not self.exhausted_range:
            lo = self.next_cursor
            hi = min(lo + self.segment - 1, self.range.upper)
            self.next_cursor = hi + 1
            found = sieve_primes(lo, hi, max_span=self.segment)
            if found:
                for p in found:
                    heapq.heappush(self._free, p)
                self._free_set.update(found)
                return True
        return False

    def _tick(self) -> int:
        self._clock += 1
        return self._clock

    def allocate(self) -> int | None:
        """Smallest free prime, or None when the bounded range is used up."""
        if not self._free and not self._extend():
            return None
        p = heapq.heappop(self._free)
        self._free_set.discard(p)
        self.allocated[p] = self._tick()
        return p

    def touch(self, p: int) -> None:
        if p not in self.allocated:
            raise UnknownPrime(p)
        self.allocated[p] = self._tick()

    def release(self, p: int) -> None:
        if p not in self.allocated:
            raise UnknownPrime(p)
        del self.allocated[p]
        heapq.heappush(self._free, p)
        self._free_set.add(p)

    def recycle_lru(self, count: int) -> list[int]:
        """Return the ``count`` least recently used primes to the free set.

        Ties on the use-ordinal go to the smaller prime. The caller owns the
        job of dropping element mappings and composites for what comes back.
        """
        if count < 1:
            raise ValueError("count must be positive")
        victims = heapq.nsmallest(count, self.allocated.items(), key=lambda kv: (kv[1], kv[0]))
        out = [p for p, _ in victims]
        for p in out:
            self.release(p)
        return out

    def recycle_count(self) -> int:
        return max(1, math.ceil(0.1 * len(self.allocated)))
