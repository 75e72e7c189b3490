"""Run configuration: JSON in, JSON echo out."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from pfcs.assignment import AssignmentConfig
from pfcs.cache import DEFAULT_PREFETCH_CAP, CacheConfig
from pfcs.factorizer import DEFAULT_CACHE_CAPACITY
from pfcs.levels import DEFAULT_LEVELS, Level, LevelConfig, check_levels
from pfcs.relations import DEFAULT_ARITY_CAP
from pfcs.workloads import WorkloadSpec

KNOWN_POLICIES = ("lru", "arc", "lirs", "pfcs", "semantic")
U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    levels: tuple[LevelConfig, ...] = DEFAULT_LEVELS
    policies: tuple[str, ...] = ("lru", "arc", "lirs", "pfcs")
    workload: WorkloadSpec | None = field(default_factory=WorkloadSpec)
    trace: str | None = None
    prefetch_cap: int = DEFAULT_PREFETCH_CAP
    arity_cap: int = DEFAULT_ARITY_CAP
    alpha: float = 0.8
    f_hot: float = 4.0
    f_warm: float = 1.0
    fcache_capacity: int = DEFAULT_CACHE_CAPACITY
    lirs_hir_fraction: float = 0.01
    repetitions: int = 1
    seed: int = 0
    out: str | None = None

    def validate(self) -> RunConfig:
        try:
            check_levels(self.levels)
            AssignmentConfig(self.alpha, self.f_hot, self.f_warm)
            if self.workload is not None:
                self.workload.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not self.policies:
            raise ConfigError("at least one policy is required")
        unknown = [p for p in self.policies if p not in KNOWN_POLICIES]
        if unknown:
            raise ConfigError(f"unknown policies {unknown}; choose from {list(KNOWN_POLICIES)}")
        if self.trace is None and self.workload is None:
            raise ConfigError("need a workload spec or a trace path")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if not 0 <= self.seed <= U64_MAX:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.prefetch_cap < 0 or self.arity_cap < 2 or self.fcache_capacity < 1:
            raise ConfigError("prefetch_cap >= 0, arity_cap >= 2, fcache_capacity >= 1 required")
        if not 0 < self.lirs_hir_fraction < 1:
            raise ConfigError("lirs_hir_fraction must lie in (0, 1)")
        return self

    @property
    def baseline_capacity(self) -> int:
        # the hierarchy is inclusive, so L3 bounds the distinct resident set
        return self.levels[Level.L3].capacity

    def cache_config(self, seed: int) -> CacheConfig:
        return CacheConfig(
            levels=self.levels,
            prefetch_cap=self.prefetch_cap,
            arity_cap=self.arity_cap,
            assignment=AssignmentConfig(self.alpha, self.f_hot, self.f_warm),
            fcache_capacity=self.fcache_capacity,
            seed=seed,
        )

    def workload_for(self, rep: int) -> WorkloadSpec:
        return replace(self.workload, seed=(self.seed + rep) % (U64_MAX + 1))

    def to_dict(self) -> dict:
        wl = None
        if self.workload is not None:
            wl = self.workload.to_dict()
            del wl["seed"]  # derived from the run seed per repetition
        return {
            "levels": [lc.to_dict() for lc in self.levels],
            "policies": list(self.policies),
            "workload": wl,
            "trace": self.trace,
            "prefetch_cap": self.prefetch_cap,
            "arity_cap": self.arity_cap,
            "alpha": self.alpha,
            "f_hot": self.f_hot,
            "f_warm": self.f_warm,
            "fcache_capacity": self.fcache_capacity,
            "lirs_hir_fraction": self.lirs_hir_fraction,
            "repetitions": self.repetitions,
            "seed": self.seed,
            "out": self.out,
        }

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields {sorted(unknown)}")
        try:
            if "levels" in d:
                d["levels"] = tuple(LevelConfig.from_dict(x) for x in d["levels"])
            if "policies" in d:
                d["policies"] = tuple(d["policies"])
            if d.get("workload") is not None:
                d["workload"] = WorkloadSpec(**d["workload"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from None
        return cls(**d).validate()


def load_config(path: str | Path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return RunConfig.from_dict(raw)
