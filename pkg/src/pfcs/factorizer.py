"""Multi-stage factorization under a deterministic step budget.

Small composites (<= 10**6) resolve from a smallest-prime-factor table.
Anything larger goes through a bounded LRU cache, then trial division by
primes below 1000 (at most 70% of the budget), then Brent's variant of
Pollard's rho on whatever is left. One trial division or one rho iteration
costs one step. When the budget runs out the result is partial: the factors
found so far plus an unresolved remainder.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from pfcs.primes import is_prime, sieve_primes

try:  # optional: faster modular arithmetic for the rho inner loop
    from gmpy2 import gcd as _gcd
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover
    _mpz = int
    _gcd = math.gcd

SPF_LIMIT = 10**6
TRIAL_LIMIT = 1000
STAGE1_FRACTION = 0.7
GCD_BATCH = 64
DEFAULT_CACHE_CAPACITY = 2**16

_TRIAL_PRIMES = tuple(sieve_primes(2, TRIAL_LIMIT))


class InvalidComposite(ValueError):
    pass


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[int, ...]  # ascending, with multiplicity
    remainder: int = 1

    @property
    def complete(self) -> bool:
        return self.remainder == 1

    @property
    def distinct(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.factors)))

    def product(self) -> int:
        """Product of the factors found; times ``remainder`` it gives ``value``."""
        return math.prod(self.factors)


class SpfTable:
    """Smallest prime factor for every index 2..limit."""

    def __init__(self, spf: np.ndarray):
        self.spf = spf
        self.limit = len(spf) - 1

    def __getitem__(self, n: int) -> int:
        return int(self.spf[n])

    def factor(self, n: int) -> tuple[int, ...]:
        if not 2 <= n <= self.limit:
            raise ValueError(f"{n} outside table range 2..{self.limit}")
        spf = self.spf
        out = []
        while n > 1:
            p = int(spf[n])
            out.append(p)
            n //= p
        return tuple(out)


def build_spf_table(limit: int = SPF_LIMIT) -> SpfTable:
    spf = np.arange(limit + 1, dtype=np.uint32)
    # Walk primes downward so the smallest divisor is written last.
    for p in reversed(sieve_primes(2, math.isqrt(limit))):
        spf[p * p :: p] = p
    return SpfTable(spf)


@lru_cache(maxsize=1)
def default_spf_table() -> SpfTable:
    return build_spf_table()


class FactorizationCache:
    """Bounded LRU map from composite to Factorization.

    Each entry remembers the budget it was computed with, so a partial
    result is served only to callers that would not have done better.
    """

    def __init__(self, capacity: int = DEFAULT_CACHE_CAPACITY):
        if capacity < 1:
            raise ValueError("cache capacity must be positive")
        self.capacity = capacity
        self._entries: OrderedDict[int, tuple[Factorization, int]] = OrderedDict()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, c: int) -> bool:
        return c in self._entries

    def get(self, c: int, budget: int | None = None) -> Factorization | None:
        hit = self._entries.get(c)
        if hit is None:
            return None
        fact, spent = hit
        if not fact.complete and budget is not None and budget > spent:
            return None  # retryable partial
        self._entries.move_to_end(c)
        return fact

    def put(self, c: int, fact: Factorization, budget: int = 0) -> None:
        old = self._entries.get(c)
        if old is not None and old[0].complete and not fact.complete:
            self._entries.move_to_end(c)
            return
        self._entries[c] = (fact, budget)
        self._entries.move_to_end(c)
        while len(self._entries) > self.capacity:
            self._entries.popitem(last=False)


def _integer_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


_ROOT_EXPONENTS = tuple(sieve_primes(2, 4096))
_MASK64 = 2**64 - 1


def perfect_power(n: int, min_base: int = 2) -> tuple[int, int] | None:
    """(b, k) with b**k == n, k >= 2 and b not itself a perfect power; else None.

    ``min_base`` is a lower bound on any prime factor of n; it caps the
    exponents worth trying.
    """
    bits = n.bit_length()
    max_k = bits // max(1, min_base.bit_length() - 1)
    for k in _ROOT_EXPONENTS:
        if k > max_k:
            break
        if k == 2:
            b = math.isqrt(n)
            b = b if b * b == n else None
        elif bits < 1000 and bits // k < 48:
            # float root is exact to +-1 while the base fits in a double
            guess = round(n ** (1.0 / k))
            b = next((g for g in (guess, guess - 1, guess + 1) if g > 1 and g**k == n), None)
        else:
            b = _integer_root(n, k)
            b = b if b > 1 and b**k == n else None
        if b is not None:
            inner = perfect_power(b)
            if inner is not None:
                return inner[0], inner[1] * k
            return b, k
    return None


class _Steps:
    __slots__ = ("left",)

    def __init__(self, left: int):
        self.left = left


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def _peel(n: int, steps: _Steps, seed: int, first_only: bool = False) -> tuple[list[int], int]:
    """Brent walk that keeps going on the cofactor after each split.

    Returns (pieces, rest) with prod(pieces) * rest == n. Pieces are
    nontrivial divisors, not necessarily prime. ``rest`` is what was not
    split further: 1, a prime, or a composite the budget did not cover.
    """
    pieces: list[int] = []
    state = _splitmix64(seed ^ (n & _MASK64) ^ (n.bit_length() << 56))
    while n > 1 and steps.left > 0:
        if n % 2 == 0:
            steps.left -= 1
            pieces.append(2)
            n //= 2
            if first_only:
                break
            continue
        if is_prime(n):
            break
        state = _splitmix64(state)
        y = _mpz(state % n)
        state = _splitmix64(state)
        c = _mpz(state % (n - 1) + 1)
        n = _mpz(n)
        q = r = 1
        fresh_polynomial = False
        while not fresh_polynomial:
            x = y
            run = min(r, steps.left)
            for _ in range(run):
                y = (y * y + c) % n
            steps.left -= run
            if run < r:
                return pieces, int(n)
            k = 0
            while k < r:
                ys = y
                run = min(GCD_BATCH, r - k)
                if steps.left < run:
                    steps.left = 0
                    return pieces, int(n)
                for _ in range(run):
                    y = (y * y + c) % n
                    q = q * (x - y) % n
                steps.left -= run
                k += run
                g = _gcd(q, n)
                if g == 1:
                    continue
                if g == n:
                    # batch overshot: replay one step at a time from its start
                    g = 1
                    while g == 1:
                        if steps.left < 1:
                            return pieces, int(n)
                        steps.left -= 1
                        ys = (ys * ys + c) % n
                        g = _gcd(x - ys, n)
                    if g == n:
                        fresh_polynomial = True
                        break
                pieces.append(int(g))
                n //= g
                if first_only or is_prime(int(n)):
                    return pieces, int(n)
                x %= n
                y %= n
                q = 1
            r <<= 1
        n = int(n)
    return pieces, int(n)


def pollard_rho(n: int, budget: int, seed: int = 0) -> int | None:
    """A nontrivial factor of composite n, or None if the budget runs out.

    Brent's cycle detection with gcds batched 64 at a time. Each failed
    polynomial draws a fresh (start, constant) pair from a splitmix64
    stream keyed on (seed, n), so the outcome depends only on (n, budget, seed).
    """
    if n < 4:
        return None
    pieces, _ = _peel(n, _Steps(budget), seed, first_only=True)
    return pieces[0] if pieces else None


def _split_remaining(n: int, steps: _Steps, seed: int, min_base: int = 2) -> tuple[list[int], int]:
    """Fully factor n with rho, within ``steps``. Returns (primes, unresolved)."""
    found: list[int] = []
    unresolved = 1
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found.append(m)
            continue
        pp = perfect_power(m, min_base)
        if pp is not None:
            stack.extend([pp[0]] * pp[1])
            continue
        if steps.left <= 0:
            unresolved *= m
            continue
        pieces, rest = _peel(m, steps, seed)
        if not pieces:
            unresolved *= rest
            continue
        stack.append(rest)
        stack.extend(pieces)
    return found, unresolved


def _factor_large(c: int, budget: int, seed: int) -> Factorization:
    factors: list[int] = []
    remaining = c
    used = 0
    stage1 = int(STAGE1_FRACTION * budget)
    bound = min(TRIAL_LIMIT, math.isqrt(c))
    cleared = True  # every trial prime up to bound got tested out
    for p in _TRIAL_PRIMES:
        if p > bound:
            break
        if used >= stage1:
            cleared = False
            break
        # each divisibility test is one step
        while used < stage1:
            used += 1
            if remaining % p:
                break
            factors.append(p)
            remaining //= p
        if remaining == 1:
            break
    if remaining > 1:
        if is_prime(remaining):
            factors.append(remaining)
            remaining = 1
        else:
            min_base = bound + 1 if cleared else 2
            more, remaining = _split_remaining(remaining, _Steps(budget - used), seed, min_base)
            factors.extend(more)
    return Factorization(c, tuple(sorted(factors)), remaining)


def factorize(
    c: int,
    budget: int,
    cache: FactorizationCache | None = None,
    spf: SpfTable | None = None,
    seed: int = 0,
) -> Factorization:
    """Factor c within ``budget`` steps.

    c <= 10**6 always completes from the table. Larger values consult the
    cache first; partial results are cached but retried by any later call
    with a bigger budget.

    >>> factorize(3027, 0).factors
    (3, 1009)
    """
    if not isinstance(c, int) or c < 2:
        raise InvalidComposite(c)
    if budget < 0:
        raise ValueError("budget must be non-negative")
    spf = spf or default_spf_table()
    if c <= spf.limit:
        return Factorization(c, spf.factor(c))
    if cache is not None:
        hit = cache.get(c, budget)
        if hit is not None:
            return hit
    fact = _factor_large(c, budget, seed)
    if cache is not None:
        cache.put(c, fact, budget)
    return fact


class Factorizer:
    """Bundles the table, a cache and a seed; what the registry talks to."""

    def __init__(self, cache_capacity: int = DEFAULT_CACHE_CAPACITY, seed: int = 0, spf: SpfTable | None = None):
        self.spf = spf or default_spf_table()
        self.cache = FactorizationCache(cache_capacity)
        self.seed = seed
        self.calls = 0

    def factorize(self, c: int, budget: int) -> Factorization:
        self.calls += 1
        return factorize(c, budget, self.cache, self.spf, self.seed)
