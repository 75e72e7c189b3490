"""Hit rates of every policy on the three synthetic workloads.

    python scripts/compare_policies.py --events 50000 --repetitions 3
"""

import argparse
from dataclasses import replace

from pfcs.bench import run
from pfcs.config import RunConfig
from pfcs.workloads import WorkloadSpec

WORKLOADS = {
    "sequential": WorkloadSpec("sequential", n_elements=6000),
    "zipf": WorkloadSpec("zipf", n_elements=200000, zipf_theta=0.8),
    "join": WorkloadSpec("join", n_elements=9000, join_fanout=2, join_follow_prob=0.9),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--events", type=int, default=50000)
    ap.add_argument("--repetitions", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    base = RunConfig(repetitions=args.repetitions, seed=args.seed)
    policies = [p for p in base.policies if p != "semantic"]
    print(f"{'workload':<12}" + "".join(f"{p:>9}" for p in policies))
    for name, spec in WORKLOADS.items():
        cfg = replace(base, workload=replace(spec, n_events=args.events))
        res = run(cfg, jobs=args.jobs)["results"]
        print(f"{name:<12}" + "".join(f"{res[p]['mean_hit_rate']:>9.4f}" for p in policies))


if __name__ == "__main__":
    main()
