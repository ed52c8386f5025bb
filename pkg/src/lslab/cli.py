"""Command-line front end.

Exit codes: 0 success, 1 a check or verification failed, 2 bad usage or
configuration.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import adversary, checks, snakes
from .graphs import Complete, Grid, Hypercube, Line, build_graph
from .harness import (ExperimentConfig, emit_report, make_instance,
                      run_experiment, run_solver, trial_rng)
from .instances import Instance, QueryOracle, brute_force_minima


def _graph_kind(args):
    fam = args.family
    if fam == "hypercube":
        if args.n is None:
            raise ValueError("--n is required for hypercube")
        return Hypercube(args.n)
    if fam == "grid":
        if args.d is None or args.side is None:
            raise ValueError("--d and --side are required for grid")
        return Grid(d=args.d, side=args.side)
    if fam == "line":
        if args.N is None:
            raise ValueError("--N is required for line")
        return Line(args.N)
    if fam == "complete":
        if args.N is None:
            raise ValueError("--N is required for complete")
        return Complete(args.N)
    raise ValueError(f"unknown family: {fam!r}")


def _add_graph_flags(p):
    p.add_argument("--family", default="hypercube",
                   choices=["hypercube", "grid", "line", "complete"])
    p.add_argument("--n", type=int, help="hypercube dimension")
    p.add_argument("--d", type=int, help="grid dimension")
    p.add_argument("--side", type=int, help="grid side length")
    p.add_argument("--N", type=int, help="vertex count for line/complete")
    p.add_argument("--L", type=int, help="snake length")


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen_instance(args) -> int:
    kind = _graph_kind(args)
    cfg = ExperimentConfig(
        experiment="solver-benchmark", graph=kind, seed=args.seed,
        params={"generator": args.generator, **({"L": args.L} if args.L else {})},
    )
    rng = trial_rng(args.seed, 0)
    _, inst = make_instance(cfg, rng)
    _emit(json.dumps(inst.to_json(), indent=2) + "\n", args.out)
    return 0


def cmd_solve(args) -> int:
    rng = trial_rng(args.seed, 0)
    if args.instance:
        with open(args.instance) as fh:
            inst = Instance.from_json(json.load(fh))
        g = build_graph(inst.kind)
    else:
        kind = _graph_kind(args)
        cfg = ExperimentConfig(
            experiment="solver-benchmark", graph=kind, seed=args.seed,
            params={"generator": args.generator, **({"L": args.L} if args.L else {})},
        )
        g, inst = make_instance(cfg, rng)
    oracle = QueryOracle(inst)
    res = run_solver(args.solver, g, oracle, rng, {})
    payload = {
        "vertex": res.vertex,
        "queries": res.queries,
        "verified": res.verified,
    }
    if args.check and inst.values is not None:
        payload["is_true_local_min"] = res.vertex in brute_force_minima(g, inst.values)
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0 if res.verified else 1


def cmd_verify(args) -> int:
    names = args.checks.split(",") if args.checks else None
    results = checks.verify_suite(level=args.level, seed=args.seed, names=names)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name} ({r.seconds:.1f}s): {r.claim}")
        print(f"       {r.detail}")
        failed += not r.passed
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 0 if failed == 0 else 1


def cmd_adversary(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")]
    rows = {}
    for size in sizes:
        rep = adversary.upsilon_bounds(adversary.permutation_inversion_system(size))
        rows[f"N={size}"] = rep.to_json()
        print(f"N={size}: upsilon_geom^2={rep.upsilon_geom_sq} "
              f"upsilon_min={rep.upsilon_min} "
              f"randomized_bound={rep.randomized_bound} "
              f"quantum_order~{rep.quantum_bound_order:.4f}")
    if args.out:
        _emit(json.dumps(rows, indent=2, default=str) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    with open(args.config) as fh:
        spec = json.load(fh)
    configs = spec if isinstance(spec, list) else [spec]
    rc = 0
    for i, obj in enumerate(configs):
        cfg = ExperimentConfig.from_json(obj)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.trials is not None:
            cfg.trials = args.trials
        if args.workers is not None:
            cfg.workers = args.workers
        if args.format:
            cfg.fmt = args.format
        rep = run_experiment(cfg)
        out = args.out
        if out and len(configs) > 1:
            stem, dot, ext = out.rpartition(".")
            out = f"{stem}_{i}{dot}{ext}" if dot else f"{out}_{i}"
        if out:
            emit_report(rep, out)
            print(f"{cfg.experiment}: wrote {out}")
            if args.plot:
                from .plotting import render_report
                for p in render_report(rep, out):
                    print(f"{cfg.experiment}: wrote {p}")
        else:
            print(json.dumps(rep.to_json(), indent=2, default=str))
        print(f"{cfg.experiment} aggregates: "
              + json.dumps(rep.aggregates, default=str))
    return rc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lslab",
        description="local-search laboratory: instances, solvers, bounds",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instance", help="generate an instance as JSON")
    _add_graph_flags(p)
    p.add_argument("--generator", default="hitting-time",
                   choices=["hitting-time", "staircase", "snake"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_gen_instance)

    p = sub.add_parser("solve", help="run a solver on an instance")
    _add_graph_flags(p)
    p.add_argument("--instance", help="instance JSON file (else generate one)")
    p.add_argument("--generator", default="hitting-time",
                   choices=["hitting-time", "staircase", "snake"])
    p.add_argument("--solver", default="steepest",
                   choices=["steepest", "random-sample", "line-binary"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true",
                   help="also compare against brute-force minima")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify", help="run the correctness battery")
    p.add_argument("--level", default="quick", choices=["quick", "full"])
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--checks", help="comma-separated subset of check names")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("adversary", help="exact bound table for permutation inversion")
    p.add_argument("--sizes", default="2,4,6,8")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_adversary)

    p = sub.add_parser("sweep", help="run experiments from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--out")
    p.add_argument("--plot", action="store_true",
                   help="render figures next to the report file")
    p.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
