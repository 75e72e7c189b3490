from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class SimStats:
    """Counters shared by every policy. Prefetch fills are not accesses."""

    accesses: int = 0
    hits: int = 0
    misses: int = 0
    prefetch_issued: int = 0
    prefetch_used: int = 0
    evictions: int = 0
    factorizations: int = 0
    budget_exhaustions: int = 0

    @property
    def hit_rate(self) -> float:
        return self.hits / self.accesses if self.accesses else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hit_rate"] = self.hit_rate
        return d
