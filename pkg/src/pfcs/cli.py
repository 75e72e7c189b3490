"""Command line: ``pfcs generate | run | verify``.

Exit status is 0 on success, 1 when a verification check fails and 2 for
usage, configuration or input errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from pfcs.config import ConfigError, RunConfig, load_config
from pfcs.workloads import GENERATORS, InvalidSpec, TraceParseError, WorkloadSpec, generate, write_trace

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("expected an unsigned 64-bit integer")
    return v


def _add_workload_flags(p: argparse.ArgumentParser, defaults: bool) -> None:
    d = WorkloadSpec()
    # with defaults=False the flags only override what a config file says
    g = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--kind", choices=GENERATORS, default=g(d.generator))
    p.add_argument("--elements", type=int, default=g(d.n_elements))
    p.add_argument("--events", type=int, default=g(d.n_events))
    p.add_argument("--theta", type=float, default=g(d.zipf_theta))
    p.add_argument("--fanout", type=int, default=g(d.join_fanout))
    p.add_argument("--follow-prob", type=float, default=g(d.join_follow_prob))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pfcs", description="Prime-factorization cache simulator")
    sub = ap.add_subparsers(dest="cmd", required=True)

    gen = sub.add_parser("generate", help="write a synthetic JSONL trace")
    _add_workload_flags(gen, defaults=True)
    gen.add_argument("--seed", type=_u64, default=0)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="replay a trace against policies, emit a JSON report")
    run.add_argument("--config")
    run.add_argument("--trace")
    run.add_argument("--out")
    run.add_argument("--seed", type=_u64)
    run.add_argument("--policies", help="comma separated, e.g. lru,arc,lirs,pfcs")
    run.add_argument("--repetitions", type=int)
    run.add_argument("--jobs", type=int, default=1, help="worker processes (output does not depend on it)")
    _add_workload_flags(run, defaults=False)

    ver = sub.add_parser("verify", help="run the built-in correctness checks")
    ver.add_argument("--full", action="store_true", help="10^5-group zero-false-positive sweep")
    ver.add_argument("--seed", type=_u64, default=0)
    return ap


def _cmd_generate(args) -> int:
    spec = WorkloadSpec(
        generator=args.kind,
        n_elements=args.elements,
        n_events=args.events,
        zipf_theta=args.theta,
        join_fanout=args.fanout,
        join_follow_prob=args.follow_prob,
        seed=args.seed,
    ).validate()
    print(write_trace(args.out, generate(spec)))
    return EXIT_OK


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    over = {}
    if args.trace is not None:
        over["trace"] = args.trace
    if args.out is not None:
        over["out"] = args.out
    if args.seed is not None:
        over["seed"] = args.seed
    if args.repetitions is not None:
        over["repetitions"] = args.repetitions
    if args.policies is not None:
        over["policies"] = tuple(p.strip() for p in args.policies.split(",") if p.strip())
    wl = {
        "generator": args.kind,
        "n_elements": args.elements,
        "n_events": args.events,
        "zipf_theta": args.theta,
        "join_fanout": args.fanout,
        "join_follow_prob": args.follow_prob,
    }
    wl = {k: v for k, v in wl.items() if v is not None}
    if wl:
        over["workload"] = replace(cfg.workload or WorkloadSpec(), **wl)
    return replace(cfg, **over).validate()


def _cmd_run(args) -> int:
    from pfcs.bench import dumps_report, run

    if args.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    cfg = _run_config(args)
    text = dumps_report(run(cfg, jobs=args.jobs))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    from pfcs.verify import run_checks

    results = run_checks(full=args.full, seed=args.seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if not failed else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    handlers = {"generate": _cmd_generate, "run": _cmd_run, "verify": _cmd_verify}
    try:
        return handlers[args.cmd](args)
    except (ConfigError, InvalidSpec, TraceParseError) as exc:
        print(f"pfcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pfcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
