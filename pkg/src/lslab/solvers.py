"""Query-counted local-search solvers and the analytic quantum cost model.

All classical solvers are zero-error: the returned vertex is always a true
local minimum.  Values are cached within a run, so repeated lookups of the
same vertex cost one oracle query; the query-complexity model charges
information, not time.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log2, sqrt
from typing import Optional

import numpy as np

from .graphs import Graph, Line
from .instances import QueryOracle


@dataclass
class SolverResult:
    vertex: int
    queries: int
    verified: bool
    transcript: list[tuple[int, int]]


class _CachedOracle:
    """Per-run value cache; misses hit the underlying counting oracle."""

    def __init__(self, oracle: QueryOracle):
        self.oracle = oracle
        self.cache: dict[int, int] = {}

    def __call__(self, v: int) -> int:
        val = self.cache.get(v)
        if val is None:
            val = self.oracle.query(v)[0]
            self.cache[v] = val
        return val


def steepest_descent(g: Graph, oracle: QueryOracle, start: int) -> SolverResult:
    """Move to the lowest-valued neighbor (ties: lowest canonical index)
    until the current vertex is a local minimum."""
    q = _CachedOracle(oracle)
    base = oracle.count
    cur, fcur = _descend(g, q, int(start))
    return SolverResult(
        vertex=cur,
        queries=oracle.count - base,
        verified=all(fcur <= q(w) for w in g.neighbors(cur)),
        transcript=oracle.log,
    )


def _descend(g: Graph, q: _CachedOracle, start: int) -> tuple[int, int]:
    cur = start
    fcur = q(cur)
    while True:
        best, fbest = None, fcur
        for w in g.neighbors(cur):
            fw = q(w)
            if fw < fbest:
                best, fbest = w, fw
        if best is None:
            return cur, fcur
        cur, fcur = best, fbest


def random_sample_descent(
    g: Graph,
    oracle: QueryOracle,
    rng: np.random.Generator,
    samples: Optional[int] = None,
) -> SolverResult:
    """Query uniform vertices, then steepest-descend from the best one.

    Default sample size ceil(sqrt(N*delta)), giving expected O(sqrt(N*delta))
    total queries on random-walk-style instances.
    """
    n_v = g.num_vertices
    if samples is None:
        samples = max(1, ceil(sqrt(n_v * max(g.max_degree, 1))))
    if samples < 1:
        raise ValueError("samples must be >= 1")
    q = _CachedOracle(oracle)
    base = oracle.count
    best, fbest = None, None
    if samples >= n_v:  # full enumeration beats repeated sampling
        draws = range(n_v)
    else:
        draws = rng.integers(0, n_v, size=samples)
    for v in draws:
        v = int(v)
        fv = q(v)
        if fbest is None or fv < fbest or (fv == fbest and v < best):
            best, fbest = v, fv
    cur, fcur = _descend(g, q, best)
    return SolverResult(
        vertex=cur,
        queries=oracle.count - base,
        verified=all(fcur <= q(w) for w in g.neighbors(cur)),
        transcript=oracle.log,
    )


def line_binary_search(g: Graph, oracle: QueryOracle) -> SolverResult:
    """Find a local minimum on a line with <= 2*ceil(log2 N) + 3 queries.

    Query the two middle vertices and keep the half adjoining the smaller
    value (including its queried endpoint).  The retained interval always
    satisfies f(lo) <= f(lo-1) and f(hi) <= f(hi+1) where those neighbors
    exist, so its minimum is a local minimum of the whole line.
    """
    if not isinstance(g.kind, Line):
        raise ValueError("line_binary_search needs a Line graph")
    q = _CachedOracle(oracle)
    base = oracle.count
    lo, hi = 0, g.num_vertices - 1
    while hi - lo >= 2:
        mid = (lo + hi) // 2
        if q(mid) <= q(mid + 1):
            hi = mid
        else:
            lo = mid + 1
    flo = q(lo)
    out, fout = (lo, flo)
    if hi != lo:
        fhi = q(hi)
        if fhi < flo:
            out, fout = hi, fhi
    verified = all(fout <= q(w) for w in g.neighbors(out))
    return SolverResult(
        vertex=out,
        queries=oracle.count - base,
        verified=verified,
        transcript=oracle.log,
    )


def line_query_cap(n_v: int) -> int:
    """Worst-case query bound for line_binary_search."""
    return 2 * ceil(log2(n_v)) + 3 if n_v > 1 else 1 + 3


def quantum_cost_model(n_v: int, delta: int) -> dict:
    """Analytic cost MODEL for the Grover-accelerated sample-and-descend
    algorithm; nothing quantum is simulated.

    Returns the random-sample size, the expected number of vertices better
    than the sampled start, and the headline query cost N^(1/3) delta^(1/6).
    """
    if n_v < 1 or delta < 1:
        raise ValueError("need N >= 1 and delta >= 1")
    return {
        "model": "analytic-only",
        "N": n_v,
        "delta": delta,
        "sample_size": n_v ** (2 / 3) * delta ** (1 / 3),
        "expected_better": (n_v / delta) ** (1 / 3),
        "headline_cost": n_v ** (1 / 3) * delta ** (1 / 6),
    }
