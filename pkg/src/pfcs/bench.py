"""Trace replay against the configured policies, and report assembly."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable

from pfcs import __version__
from pfcs.baselines import ARCCache, LIRSCache, LRUCache
from pfcs.cache import PFCSCache
from pfcs.config import RunConfig
from pfcs.stats import SimStats
from pfcs.workloads import TraceEvent, generate, read_trace


def make_policy(name: str, cfg: RunConfig, seed: int = 0):
    cap = cfg.baseline_capacity
    if name == "lru":
        return LRUCache(cap)
    if name == "arc":
        return ARCCache(cap)
    if name == "lirs":
        return LIRSCache(cap, hir_fraction=cfg.lirs_hir_fraction)
    if name == "pfcs":
        return PFCSCache(cfg.cache_config(seed))
    raise ValueError(f"no simulator for policy {name!r}")


def replay(policy, events: Iterable[TraceEvent]) -> list[bool]:
    """Feed events to policy; returns the hit/miss sequence of the accesses."""
    out = []
    for ev in events:
        if ev.kind == "access":
            out.append(policy.access(ev.keys[0]))
        else:
            policy.relate(ev.keys)
    return out


def trace_for(cfg: RunConfig, rep: int) -> Iterable[TraceEvent]:
    if cfg.trace is not None:
        return read_trace(cfg.trace)
    return generate(cfg.workload_for(rep))


def run_one(cfg: RunConfig, policy: str, rep: int) -> SimStats:
    sim = make_policy(policy, cfg, seed=cfg.seed + rep)
    replay(sim, trace_for(cfg, rep))
    return sim.report()


def _task(args):
    cfg, policy, rep = args
    return run_one(cfg, policy, rep)


def run(cfg: RunConfig, jobs: int = 1) -> dict:
    """Replay every (policy, repetition) pair and assemble the report.

    Output does not depend on ``jobs``: each replay owns its state and the
    results are gathered in task order.
    """
    cfg.validate()
    simulated = [p for p in cfg.policies if p != "semantic"]
    tasks = [(cfg, p, r) for p in simulated for r in range(cfg.repetitions)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            stats = list(ex.map(_task, tasks))
    else:
        stats = [_task(t) for t in tasks]
    by_policy: dict[str, list[SimStats]] = {}
    for (_, p, _), s in zip(tasks, stats):
        by_policy.setdefault(p, []).append(s)
    results = {}
    for p in cfg.policies:
        if p == "semantic":
            results[p] = {"available": False, "reason": "no embedding model implemented"}
            continue
        runs = by_policy[p]
        results[p] = {
            "available": True,
            "mean_hit_rate": math.fsum(s.hit_rate for s in runs) / len(runs),
            "runs": [s.to_dict() for s in runs],
        }
    echo = cfg.to_dict()
    del echo["out"]  # where the report lands is not part of the experiment
    return {
        "tool": "pfcs",
        "version": __version__,
        "seed": cfg.seed,
        "config": echo,
        "results": results,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
