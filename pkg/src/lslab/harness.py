"""Reproducible experiment runner: seeded substreams, trial dispatch, and
CSV/JSON report emission.

Every random draw is derived from (seed, trial-index) through a splittable
seed sequence, so reports are byte-identical (modulo the timestamp field)
at any worker count.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

import numpy as np

from . import adversary, snakes, solvers
from .graphs import (GraphKind, Grid, Hypercube, Line, build_graph,
                     kind_from_json, kind_to_json)
from .instances import (QueryOracle, brute_force_minima, hitting_time_instance,
                        staircase_instance)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent substream for one trial; the fixed splitting rule that
    makes runs reproducible at any parallelism level."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial])))


EXPERIMENTS = (
    "solver-benchmark",
    "intersect",
    "sparse",
    "mixing",
    "goodness",
    "wsym",
    "subgraph",
    "adversary-table",
)

CLAIMS = {
    "solver-benchmark": "zero-error solvers always return a verified local minimum; "
    "uniform sampling plus steepest descent costs O(sqrt(N*delta)) queries",
    "intersect": "tail-flick disagreement probability is at most L^2/2^n",
    "sparse": "a random snake is sparse with probability tending to 1",
    "mixing": "the generating walk is exactly uniform after n steps "
    "(d*side steps on the grid)",
    "goodness": "a sparse snake hits any fixed vertex with probability O(n^2/L) "
    "when flicking its tail",
    "wsym": "the flick weight w(X,Y) is symmetric and sums to 1",
    "subgraph": "total weight >= r yields a nonempty subset whose rows all keep "
    "weight >= r*p(i)/2",
    "adversary-table": "permutation inversion: squared geometric-mean bound and "
    "min bound both equal 2/N",
}


@dataclass
class ExperimentConfig:
    experiment: str
    graph: Optional[GraphKind] = None
    params: dict = field(default_factory=dict)
    solver: Optional[str] = None
    trials: int = 1
    seed: int = 0
    fmt: str = "csv"
    workers: int = 1

    def to_json(self) -> dict:
        return {
            "experiment": self.experiment,
            "graph": kind_to_json(self.graph) if self.graph else None,
            "params": self.params,
            "solver": self.solver,
            "trials": self.trials,
            "seed": self.seed,
            "format": self.fmt,
            "workers": self.workers,
        }

    @staticmethod
    def from_json(obj: dict) -> "ExperimentConfig":
        if obj.get("experiment") not in EXPERIMENTS:
            raise ValueError(f"unknown experiment: {obj.get('experiment')!r}")
        return ExperimentConfig(
            experiment=obj["experiment"],
            graph=kind_from_json(obj["graph"]) if obj.get("graph") else None,
            params=obj.get("params", {}),
            solver=obj.get("solver"),
            trials=int(obj.get("trials", 1)),
            seed=int(obj.get("seed", 0)),
            fmt=obj.get("format", "csv"),
            workers=int(obj.get("workers", 1)),
        )


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    records: list[dict]  # per-trial rows: trial, metric, value (+ size fields)
    aggregates: dict
    annotation: str
    timestamp: str

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "records": self.records,
            "aggregates": self.aggregates,
            "annotation": self.annotation,
            "timestamp": self.timestamp,
        }


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment: {cfg.experiment!r}")
    runner = _RUNNERS[cfg.experiment]
    records, aggregates = runner(cfg)
    return ExperimentReport(
        config=cfg,
        records=records,
        aggregates=aggregates,
        annotation=CLAIMS[cfg.experiment],
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def _map_trials(cfg: ExperimentConfig, fn_name: str) -> list:
    """Run a per-trial worker across trials, serially or in a process pool;
    results come back in trial order either way."""
    args = [(fn_name, cfg.to_json(), t) for t in range(cfg.trials)]
    if cfg.workers <= 1 or cfg.trials <= 1:
        return [_trial_entry(a) for a in args]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_trial_entry, args, chunksize=max(1, cfg.trials // (8 * cfg.workers))))


def _trial_entry(arg):
    fn_name, cfg_json, trial = arg
    cfg = ExperimentConfig.from_json(cfg_json)
    return _TRIAL_FNS[fn_name](cfg, trial)


# ---------------------------------------------------------------------------
# experiment bodies


def _size_fields(kind: Optional[GraphKind], length=None) -> dict:
    if kind is None:
        n_or_n = ""
    elif isinstance(kind, Hypercube):
        n_or_n = kind.n
    else:
        n_or_n = build_graph(kind).num_vertices
    return {"n_or_N": n_or_n, "L": "" if length is None else length}


def _sample_snake(kind: GraphKind, length: int, rng) -> snakes.Snake:
    g = build_graph(kind)
    head = int(rng.integers(g.num_vertices))
    if isinstance(kind, Hypercube):
        return snakes.sample_hypercube_snake(kind.n, head, length, rng)
    if isinstance(kind, Grid):
        return snakes.sample_grid_snake(kind.d, kind.side, head, length, rng)
    raise ValueError("snakes live on hypercubes and grids")


def make_instance(cfg: ExperimentConfig, rng) -> tuple:
    """(graph, instance) for the configured generator."""
    g = build_graph(cfg.graph)
    gen = cfg.params.get("generator", "hitting-time")
    if gen == "hitting-time":
        inst = hitting_time_instance(g, rng)
    elif gen == "staircase":
        center = int(rng.integers(g.num_vertices))
        inst = staircase_instance(g, center, rng)
    elif gen == "snake":
        length = int(cfg.params.get("L", 8))
        inst = snakes.snake_instance(_sample_snake(cfg.graph, length, rng))
    else:
        raise ValueError(f"unknown generator: {gen!r}")
    return g, inst


def run_solver(name: str, g, oracle, rng, params) -> solvers.SolverResult:
    if name in ("steepest", "steepest-descent"):
        start = int(params.get("start", rng.integers(g.num_vertices)))
        return solvers.steepest_descent(g, oracle, start)
    if name in ("random-sample", "random-sample-descent"):
        samples = params.get("samples")
        return solvers.random_sample_descent(
            g, oracle, rng, int(samples) if samples else None
        )
    if name in ("line-binary", "line-binary-search"):
        return solvers.line_binary_search(g, oracle)
    raise ValueError(f"unknown solver: {name!r}")


def _solver_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    rng = trial_rng(cfg.seed, trial)
    g, inst = make_instance(cfg, rng)
    oracle = QueryOracle(inst)
    res = run_solver(cfg.solver or "random-sample", g, oracle, rng, cfg.params)
    success = res.verified and res.vertex in brute_force_minima(g, inst.values)
    base = {"trial": trial, **_size_fields(cfg.graph, cfg.params.get("L"))}
    return [
        {**base, "metric": "queries", "value": res.queries},
        {**base, "metric": "success", "value": int(success)},
    ]


def _run_solver_benchmark(cfg):
    records = [row for rows in _map_trials(cfg, "solver") for row in rows]
    if not records:
        return records, {}
    queries = [r["value"] for r in records if r["metric"] == "queries"]
    succ = [r["value"] for r in records if r["metric"] == "success"]
    aggregates = {
        "mean_queries": statistics.fmean(queries),
        "median_queries": statistics.median(queries),
        "max_queries": max(queries),
        "success_rate": statistics.fmean(succ),
        "success_stderr": _binom_se(statistics.fmean(succ), len(succ)),
    }
    return records, aggregates


def _intersect_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    rng = trial_rng(cfg.seed, trial)
    length = int(cfg.params.get("L", 25))
    x = _sample_snake(cfg.graph, length, rng)
    flicks = int(cfg.params.get("flicks", 1000))
    fails = sum(0 if snakes.flick_tail(x, rng).agree else 1 for _ in range(flicks))
    base = {"trial": trial, **_size_fields(cfg.graph, length)}
    return [{**base, "metric": "disagree_count", "value": fails},
            {**base, "metric": "flicks", "value": flicks}]


def _run_intersect(cfg):
    records = [row for rows in _map_trials(cfg, "intersect") for row in rows]
    if not records:
        return records, {}
    fails = sum(r["value"] for r in records if r["metric"] == "disagree_count")
    flicks = sum(r["value"] for r in records if r["metric"] == "flicks")
    rate = fails / flicks
    kind = cfg.graph
    n_v = build_graph(kind).num_vertices
    length = int(cfg.params.get("L", 25))
    aggregates = {
        "disagree_rate": rate,
        "disagree_stderr": _binom_se(rate, flicks),
        "bound": length**2 / n_v,
    }
    return records, aggregates


def _sparse_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    rng = trial_rng(cfg.seed, trial)
    length = int(cfg.params.get("L", 64))
    c = float(cfg.params.get("c", 3.0))
    x = _sample_snake(cfg.graph, length, rng)
    rep = snakes.sparseness_check(x, c=c, mode=cfg.params.get("mode", "exact"),
                                  v_count=int(cfg.params.get("v_count", 1024)), rng=rng)
    base = {"trial": trial, **_size_fields(cfg.graph, length)}
    return [{**base, "metric": "sparse", "value": int(rep.sparse)}]


def _run_sparse(cfg):
    records = [row for rows in _map_trials(cfg, "sparse") for row in rows]
    if not records:
        return records, {}
    frac = statistics.fmean(r["value"] for r in records)
    return records, {"sparse_fraction": frac, "c": float(cfg.params.get("c", 3.0))}


def _run_mixing(cfg):
    g = build_graph(cfg.graph)
    gaps = cfg.params.get("gaps")
    if gaps is None:
        if isinstance(cfg.graph, Hypercube):
            gaps = [cfg.graph.n - 1, cfg.graph.n]
        else:
            gaps = [cfg.graph.d * cfg.graph.side]
    start = int(cfg.params.get("start", 0))
    records = []
    for i, gap in enumerate(gaps):
        dev = snakes.mixing_check(cfg.graph, start, int(gap))
        records.append({"trial": i, **_size_fields(cfg.graph),
                        "metric": f"deviation_gap_{gap}", "value": dev})
    return records, {"max_deviation_at_full_gap": records[-1]["value"]}


def _goodness_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    rng = trial_rng(cfg.seed, trial)
    length = int(cfg.params.get("L", 32))
    flicks = int(cfg.params.get("flicks", 1000))
    x = _sample_snake(cfg.graph, length, rng)
    p_agree, eps_hat = snakes.goodness_estimate(x, trials=flicks, rng=rng)
    base = {"trial": trial, **_size_fields(cfg.graph, length)}
    return [
        {**base, "metric": "p_agree", "value": p_agree},
        {**base, "metric": "eps_hat", "value": eps_hat},
    ]


def _run_goodness(cfg):
    records = [row for rows in _map_trials(cfg, "goodness") for row in rows]
    if not records:
        return records, {}
    p_agrees = [r["value"] for r in records if r["metric"] == "p_agree"]
    eps_hats = [r["value"] for r in records if r["metric"] == "eps_hat"]
    length = int(cfg.params.get("L", 32))
    n = cfg.graph.n if isinstance(cfg.graph, Hypercube) else None
    aggregates = {
        "agree_fraction_ge_0.9": statistics.fmean(p >= 0.9 for p in p_agrees),
        "max_eps_hat": max(eps_hats),
    }
    if n:
        aggregates["max_eps_hat_scaled"] = max(eps_hats) * length / n**2
    return records, aggregates


def _run_wsym(cfg):
    n = int(cfg.params.get("n", cfg.graph.n if isinstance(cfg.graph, Hypercube) else 4))
    length = int(cfg.params.get("L", 6))
    snakes_list = adversary.enumerate_hypercube_snakes(n, length)
    w = adversary.snake_weight_matrix(snakes_list)
    m = len(snakes_list)
    sym = all(w.get((i, j)) == w.get((j, i)) for i in range(m) for j in range(m))
    total = sum(w.values(), Fraction(0))
    records = [
        {"trial": 0, "n_or_N": n, "L": length, "metric": "w_symmetric", "value": int(sym)},
        {"trial": 0, "n_or_N": n, "L": length, "metric": "w_total_is_1",
         "value": int(total == 1)},
    ]
    return records, {"symmetric": sym, "total": str(total), "pairs": m * m}


def random_prune_case(rng, m_max: int = 30):
    """Random (p, w, r) with integer-scaled weights and total weight >= r."""
    m = int(rng.integers(1, m_max + 1))
    q = rng.integers(1, 100, size=m)
    den = int(q.sum())
    p = [Fraction(int(v), den) for v in q]
    w = np.zeros((m, m), dtype=np.int64)
    upper = rng.integers(0, 20, size=(m, m))
    mask = rng.random((m, m)) < 0.5  # sparse-ish
    upper = np.where(mask, upper, 0)
    w = np.triu(upper) + np.triu(upper, 1).T
    total = int(w.sum())
    if total == 0:
        w[0, 0] = 1
        total = 1
    r = int(rng.integers(0, total + 1))
    return p, w.tolist(), r


def _subgraph_trial(cfg: ExperimentConfig, trial: int) -> list[dict]:
    rng = trial_rng(cfg.seed, trial)
    m_max = int(cfg.params.get("m_max", 30))
    p, w, r = random_prune_case(rng, m_max)
    kept = adversary.subgraph_prune(p, w, r)
    ok = bool(kept) and all(
        2 * Fraction(sum(w[i][j] for j in kept)) >= Fraction(r) * p[i] for i in kept
    )
    return [{"trial": trial, "n_or_N": len(p), "L": "", "metric": "ok", "value": int(ok)}]


def _run_subgraph(cfg):
    records = [row for rows in _map_trials(cfg, "subgraph") for row in rows]
    if not records:
        return records, {}
    frac = statistics.fmean(r["value"] for r in records)
    return records, {"ok_fraction": frac}


def _run_adversary_table(cfg):
    sizes = cfg.params.get("Ns", [2, 4, 6, 8])
    records = []
    aggregates = {}
    for i, size in enumerate(sizes):
        sys = adversary.permutation_inversion_system(int(size))
        rep = adversary.upsilon_bounds(sys)
        records.extend([
            {"trial": i, "n_or_N": size, "L": "", "metric": "upsilon_geom_sq",
             "value": str(rep.upsilon_geom_sq)},
            {"trial": i, "n_or_N": size, "L": "", "metric": "upsilon_min",
             "value": str(rep.upsilon_min)},
            {"trial": i, "n_or_N": size, "L": "", "metric": "randomized_bound",
             "value": str(rep.randomized_bound)},
        ])
        aggregates[f"N={size}"] = rep.to_json()
    return records, aggregates


_RUNNERS = {
    "solver-benchmark": _run_solver_benchmark,
    "intersect": _run_intersect,
    "sparse": _run_sparse,
    "mixing": _run_mixing,
    "goodness": _run_goodness,
    "wsym": _run_wsym,
    "subgraph": _run_subgraph,
    "adversary-table": _run_adversary_table,
}

_TRIAL_FNS = {
    "solver": _solver_trial,
    "intersect": _intersect_trial,
    "sparse": _sparse_trial,
    "goodness": _goodness_trial,
    "subgraph": _subgraph_trial,
}


def _binom_se(p: float, n: int) -> float:
    return (p * (1 - p) / n) ** 0.5 if n else 0.0


# ---------------------------------------------------------------------------
# report emission

CSV_COLUMNS = ["experiment", "n_or_N", "L", "trial", "seed", "metric", "value"]


def report_csv(rep: ExperimentReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for rec in rep.records:
        writer.writerow({
            "experiment": rep.config.experiment,
            "n_or_N": rec.get("n_or_N", ""),
            "L": rec.get("L", ""),
            "trial": rec.get("trial", ""),
            "seed": rep.config.seed,
            "metric": rec["metric"],
            "value": rec["value"],
        })
    return buf.getvalue()


def emit_report(rep: ExperimentReport, path: str, fmt: Optional[str] = None) -> str:
    fmt = fmt or rep.config.fmt
    if fmt == "csv":
        payload = report_csv(rep)
    elif fmt == "json":
        payload = json.dumps(rep.to_json(), indent=2, default=str) + "\n"
    else:
        raise ValueError(f"unknown format: {fmt!r}")
    with open(path, "w") as fh:
        fh.write(payload)
    return path
