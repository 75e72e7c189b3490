"""PFCS against LRU/ARC/LIRS on the join workload as cache capacity shrinks.

Capacity is given as a fraction of the working set (all keys in the trace).

    python scripts/capacity_sweep.py --elements 3000 --events 20000
"""

import argparse
from dataclasses import replace

from pfcs.bench import run
from pfcs.config import RunConfig
from pfcs.levels import Level
from pfcs.workloads import WorkloadSpec

FRACTIONS = (0.05, 0.1, 0.25, 0.5, 1.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--elements", type=int, default=3000)
    ap.add_argument("--events", type=int, default=20000)
    ap.add_argument("--follow-prob", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    spec = WorkloadSpec("join", args.elements, args.events, join_fanout=2, join_follow_prob=args.follow_prob)
    policies = ("lru", "arc", "lirs", "pfcs")
    print(f"{'fraction':>8} {'capacity':>8}" + "".join(f"{p:>9}" for p in policies) + f"{'gain':>8}")
    for frac in FRACTIONS:
        cap = max(1, int(frac * args.elements))
        levels = list(RunConfig().levels)
        l3 = levels[Level.L3]
        levels[Level.L3] = replace(l3, capacity=cap)
        for lv in (Level.L1, Level.L2):
            levels[lv] = replace(levels[lv], capacity=min(levels[lv].capacity, cap))
        cfg = RunConfig(levels=tuple(levels), policies=policies, workload=spec, seed=args.seed)
        res = run(cfg)["results"]
        rates = [res[p]["mean_hit_rate"] for p in policies]
        gain = 100 * (res["pfcs"]["mean_hit_rate"] - res["lru"]["mean_hit_rate"])
        print(f"{frac:>8.2f} {cap:>8}" + "".join(f"{r:>9.4f}" for r in rates) + f"{gain:>7.1f}pp")


if __name__ == "__main__":
    main()
