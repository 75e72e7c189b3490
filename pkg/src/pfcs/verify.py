"""User-facing correctness checks behind ``pfcs verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from pfcs.assignment import AccessStats, AssignmentTable
from pfcs.factorizer import Factorizer, factorize
from pfcs.levels import Level
from pfcs.primes import sieve_primes
from pfcs.relations import RelationRegistry


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def populate_tiered(table: AssignmentTable, n_elements: int, rng: random.Random, hot: int = 150, warm: int = 9000) -> None:
    """Assign every element a prime with a hot/warm/cold popularity profile.

    Elements are shuffled, the first ``hot`` get a frequency above the L1
    cut point, the next ``warm`` one between the cut points and the rest none.
    All count a pending relation, so cold elements land in L3.
    """
    cfg = table.config
    order = list(range(n_elements))
    rng.shuffle(order)
    for rank, d in enumerate(order):
        if rank < hot:
            f = cfg.f_hot * 2
        elif rank < hot + warm:
            f = (cfg.f_hot + cfg.f_warm) / 2
        else:
            f = 0.0
        table.stats[d] = AccessStats(f, 0)
        table.assign_prime(d, now=0, pending_relations=1)


def zero_false_positive_sweep(n_groups: int, n_elements: int = 10_000, seed: int = 0, budget: int = 10**6) -> CheckResult:
    """Register random groups of arity 2..8, then rediscover each by factoring."""
    rng = random.Random(seed)
    table = AssignmentTable()
    populate_tiered(table, n_elements, rng, hot=min(150, n_elements), warm=min(9000, max(0, n_elements - 150)))
    reg = RelationRegistry(table, Factorizer(seed=seed))
    groups = []
    for _ in range(n_groups):
        members = frozenset(rng.sample(range(n_elements), rng.randint(2, 8)))
        groups.append((reg.register_group(members), members))
    bad = 0
    for c, members in groups:
        found = reg.discover(c, budget)
        if not found.complete or found.elements != members or found.dangling:
            bad += 1
    return CheckResult("zero false positives", bad == 0, f"{n_groups - bad}/{n_groups} groups rediscovered exactly")


def trial_division_oracle(limit: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized trial division of every n in [0, limit).

    Returns (primes, exponents, cofactor): exponents[i, n] is the power of
    primes[i] in n, and cofactor[n] is what is left, itself 1 or a prime.
    """
    small = np.array(sieve_primes(2, int(limit**0.5) + 1), dtype=np.int64)
    rest = np.arange(limit, dtype=np.int64)
    exps = np.zeros((len(small), limit), dtype=np.int8)
    for i, p in enumerate(small):
        while True:
            hit = (rest % p == 0) & (rest > 1)
            if not hit.any():
                break
            exps[i, hit] += 1
            rest[hit] //= p
    return small, exps, rest


def spf_oracle_sweep(limit: int = 10**6) -> CheckResult:
    small, exps, rest = trial_division_oracle(limit)
    bad = []
    for c in range(2, limit):
        got = factorize(c, 0).factors
        want = []
        col = exps[:, c]
        for i in np.flatnonzero(col):
            want.extend([int(small[i])] * int(col[i]))
        if rest[c] > 1:
            want.append(int(rest[c]))
        if tuple(want) != got:
            bad.append(c)
            if len(bad) >= 10:
                break
    return CheckResult("factorization oracle", not bad, f"every c in [2, {limit}) matches" if not bad else f"mismatches at {bad}")


def golden_examples() -> list[CheckResult]:
    out = []
    cases = (
        ("143 = 11 x 13", 143, {11, 13}),
        ("6 = 2 x 3", 6, {2, 3}),
        ("3027 = 3 x 1009", 3027, {3, 1009}),
    )
    for name, c, want in cases:
        table = AssignmentTable()
        reg = RelationRegistry(table)
        # pin the primes the worked examples use
        for i, p in enumerate(sorted(want)):
            table.data_to_prime[i] = p
            table.prime_to_data[p] = i
        found = reg.discover(c, table.budget(Level.MEMORY))
        got = set(found.factorization.distinct)
        ok = got == want and found.complete and found.elements == frozenset(range(len(want)))
        out.append(CheckResult(f"golden {name}", ok, f"factors {sorted(got)}"))
    return out


def run_checks(full: bool = False, seed: int = 0) -> list[CheckResult]:
    results = golden_examples()
    results.append(spf_oracle_sweep())
    results.append(zero_false_positive_sweep(10**5 if full else 10**4, seed=seed))
    return results
