"""Relationship registry: groups of elements encoded as squarefree composites."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from pfcs.assignment import AssignmentTable
from pfcs.factorizer import Factorization, Factorizer

DEFAULT_ARITY_CAP = 16


class ArityError(ValueError):
    pass


class UnassignedMember(KeyError):
    pass


@dataclass(frozen=True)
class RelationGroup:
    members: frozenset[int]
    primes: tuple[int, ...]
    composite: int
    created_at: int
    seq: int  # registration order, for most-recent-first scans


@dataclass(frozen=True)
class Discovery:
    elements: frozenset[int]
    complete: bool
    dangling: frozenset[int]  # factor primes that no live element holds
    factorization: Factorization


class RelationRegistry:
    def __init__(self, table: AssignmentTable, factorizer: Factorizer | None = None, arity_cap: int = DEFAULT_ARITY_CAP):
        if arity_cap < 2:
            raise ValueError("arity cap must be at least 2")
        self.table = table
        self.factorizer = factorizer or Factorizer()
        self.arity_cap = arity_cap
        self.groups: dict[int, RelationGroup] = {}
        self.by_prime: dict[int, set[int]] = {}
        self._seq = 0
        self._listeners: list[Callable[[frozenset[int]], None]] = []
        table.on_recycle(lambda p, _d: self.purge_prime(p))

    def __len__(self):
        return len(self.groups)

    def __contains__(self, c: int) -> bool:
        return c in self.groups

    def on_change(self, fn: Callable[[frozenset[int]], None]) -> None:
        """fn(members) runs whenever a group is added or removed."""
        self._listeners.append(fn)

    def register_group(self, members: Iterable[int], now: int = 0) -> int:
        members = list(members)
        uniq = frozenset(members)
        if len(uniq) != len(members):
            raise ValueError("relation members must be distinct")
        if not 2 <= len(uniq) <= self.arity_cap:
            raise ArityError(f"group of {len(uniq)} outside 2..{self.arity_cap}")
        primes = []
        for d in members:
            p = self.table.prime_of(d)
            if p is None:
                raise UnassignedMember(d)
            primes.append(p)
        composite = math.prod(primes)
        if composite in self.groups:
            return composite
        self._seq += 1
        group = RelationGroup(uniq, tuple(sorted(primes)), composite, now, self._seq)
        self.groups[composite] = group
        for p in group.primes:
            self.by_prime.setdefault(p, set()).add(composite)
        for d in uniq:
            self.table.add_relations(d, 1)
        for fn in self._listeners:
            fn(uniq)
        return composite

    def discover(self, c: int, budget: int) -> Discovery:
        """Elements whose primes divide c, found by factorizing c."""
        fact = self.factorizer.factorize(c, budget)
        found, dangling = set(), set()
        for p in fact.distinct:
            d = self.table.prime_to_data.get(p)
            if d is None:
                dangling.add(p)
            else:
                found.add(d)
        return Discovery(frozenset(found), fact.complete, frozenset(dangling), fact)

    def related_composites(self, p: int) -> set[int]:
        return set(self.by_prime.get(p, ()))

    def related_groups(self, p: int) -> list[RelationGroup]:
        """Groups containing p, most recently registered first."""
        gs = [self.groups[c] for c in self.by_prime.get(p, ())]
        gs.sort(key=lambda g: g.seq, reverse=True)
        return gs

    def purge_prime(self, p: int) -> set[int]:
        removed = self.by_prime.pop(p, set())
        for c in removed:
            group = self.groups.pop(c)
            for q in group.primes:
                if q == p:
                    continue
                posting = self.by_prime.get(q)
                if posting is not None:
                    posting.discard(c)
                    if not posting:
                        del self.by_prime[q]
            for d in group.members:
                self.table.add_relations(d, -1)
            for fn in self._listeners:
                fn(group.members)
        return removed

    def check(self) -> None:
        """Audit the prime index against the stored groups."""
        for p, posting in self.by_prime.items():
            assert posting, p
            for c in posting:
                assert c in self.groups and c % p == 0, (p, c)
        for c, g in self.groups.items():
            assert math.prod(g.primes) == c
            assert len(set(g.primes)) == len(g.primes)
            for q in g.primes:
                assert c in self.by_prime.get(q, ()), (q, c)
