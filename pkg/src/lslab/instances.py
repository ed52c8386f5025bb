"""Query-counted oracles over value functions and hard-instance generators."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .graphs import Graph, GraphKind, Hypercube, build_graph, kind_from_json, kind_to_json

DEFAULT_ENUMERATION_CAP = 2**22
DEFAULT_WALK_BUDGET = 10**9


def enumeration_cap() -> int:
    """Vertex-count cap for dense materialization and brute-force scans.

    Overridable through the LSLAB_BUDGET environment variable.
    """
    raw = os.environ.get("LSLAB_BUDGET")
    return int(raw) if raw else DEFAULT_ENUMERATION_CAP


class BudgetExceededError(RuntimeError):
    pass


@dataclass
class Instance:
    """A total value function f: V -> naturals, with optional answer bit.

    Either `values` (dense array in canonical order) or `value_fn` (pure
    rule) must be set.  `minimum` is the designated unique local minimum
    when the generator guarantees one.
    """

    kind: GraphKind
    values: Optional[np.ndarray] = None
    value_fn: Optional[Callable[[int], int]] = None
    minimum: Optional[int] = None
    answer_bit: Optional[int] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values is None and self.value_fn is None:
            raise ValueError("instance needs values or a value rule")
        self._graph = None

    def graph(self) -> Graph:
        if self._graph is None:
            self._graph = build_graph(self.kind)
        return self._graph

    def value(self, v: int) -> int:
        if self.values is not None:
            return int(self.values[v])
        return int(self.value_fn(v))

    def to_json(self) -> dict:
        if self.values is None:
            raise ValueError("only materialized instances serialize")
        return {
            "graph": kind_to_json(self.kind),
            "values": [int(x) for x in self.values],
            "minimum": self.minimum,
            "answer_bit": self.answer_bit,
            "meta": self.meta,
        }

    @staticmethod
    def from_json(obj: dict) -> "Instance":
        return Instance(
            kind=kind_from_json(obj["graph"]),
            values=np.asarray(obj["values"], dtype=np.int64),
            minimum=obj.get("minimum"),
            answer_bit=obj.get("answer_bit"),
            meta=obj.get("meta", {}),
        )


class QueryOracle:
    """Deterministic query counter around an instance.

    Single-owner mutable state: use one oracle per solver run.  Every call
    increments the count, including repeats.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.count = 0
        self.log: list[tuple[int, int]] = []

    def query(self, v: int) -> tuple[int, Optional[int]]:
        """Return (f(v), answer bit or None); the bit appears only at the
        designated minimum of a decision-wrapped instance."""
        inst = self.instance
        inst.graph()._check(v)
        val = inst.value(v)
        self.count += 1
        self.log.append((int(v), val))
        bit = inst.answer_bit if (inst.answer_bit is not None and v == inst.minimum) else None
        return val, bit


def is_local_min(g: Graph, f, v: int) -> bool:
    """True iff f(v) <= f(w) for every neighbor w (weak inequality)."""
    fv = _eval(f, v)
    return all(fv <= _eval(f, w) for w in g.neighbors(v))


def _eval(f, v: int) -> int:
    if callable(f):
        return int(f(v))
    return int(f[v])


def brute_force_minima(g: Graph, f) -> set[int]:
    """Exact set of local minima by full scan; the ground-truth oracle."""
    if g.num_vertices > enumeration_cap():
        raise BudgetExceededError(
            f"N={g.num_vertices} exceeds enumeration cap {enumeration_cap()}"
        )
    if not callable(f):
        vals = np.asarray(f)
        if g.max_degree == 0:
            return set(range(g.num_vertices))
        nbr, valid = g.neighbor_matrix()
        ok = np.where(valid, vals[:, None] <= vals[nbr], True).all(axis=1)
        return set(int(i) for i in np.flatnonzero(ok))
    return {v for v in g.vertices() if is_local_min(g, f, v)}


def staircase_instance(g: Graph, v: int, rng: np.random.Generator) -> Instance:
    """Hard instance around a single vertex: a random neighbor w gets value 1,
    v gets 2, the other neighbors 3, and everything else 3 + distance to the
    closed neighborhood of v.  Unique local minimum at w."""
    nbrs = g.neighbors(v)
    if not nbrs:
        raise ValueError("staircase_instance needs a vertex of degree >= 1")
    w = int(nbrs[int(rng.integers(len(nbrs)))])
    if g.num_vertices > enumeration_cap():
        raise BudgetExceededError("staircase_instance materializes; N over cap")
    closed = [v] + list(nbrs)
    dist = np.minimum.reduce([g.distance_array(s) for s in closed])
    vals = 3 + dist
    for u in nbrs:
        vals[u] = 3
    vals[v] = 2
    vals[w] = 1
    return Instance(
        kind=g.kind,
        values=vals.astype(np.int64),
        minimum=w,
        meta={"generator": "staircase", "center": int(v), "unique-minimum": True},
    )


def hitting_time_instance(
    g: Graph, rng: np.random.Generator, step_budget: int = DEFAULT_WALK_BUDGET
) -> Instance:
    """f(v) = first hitting time of an unbiased nearest-neighbor walk from a
    uniform start, run until it covers the graph.  Unique local minimum at
    the start; all N values are distinct."""
    n_v = g.num_vertices
    if n_v > enumeration_cap():
        raise BudgetExceededError("hitting_time_instance materializes; N over cap")
    if n_v > 1 and g.max_degree == 0:
        raise ValueError("graph is not connected")
    start = int(rng.integers(n_v))
    if isinstance(g.kind, Hypercube) and g.kind.n > 0:
        hit = _hypercube_cover_walk(g.kind.n, start, rng, step_budget)
    else:
        hit = _generic_cover_walk(g, start, rng, step_budget)
    return Instance(
        kind=g.kind,
        values=hit,
        minimum=start,
        meta={"generator": "hitting-time", "unique-minimum": True},
    )


def _hypercube_cover_walk(n: int, start: int, rng, step_budget: int) -> np.ndarray:
    hit = np.full(2**n, -1, dtype=np.int64)
    hit[start] = 0
    remaining = 2**n - 1
    t0 = 1
    cur = start
    chunk = max(1024, 2**n)
    while remaining:
        if t0 > step_budget:
            raise BudgetExceededError("cover-walk step budget exceeded")
        flips = np.int64(1) << rng.integers(0, n, size=chunk)
        pos = np.bitwise_xor.accumulate(flips)
        pos ^= cur
        vals, first = np.unique(pos, return_index=True)
        fresh = hit[vals] < 0
        hit[vals[fresh]] = t0 + first[fresh]
        remaining -= int(fresh.sum())
        cur = int(pos[-1])
        t0 += chunk
    return hit


def _generic_cover_walk(g: Graph, start: int, rng, step_budget: int) -> np.ndarray:
    n_v = g.num_vertices
    hit = np.full(n_v, -1, dtype=np.int64)
    hit[start] = 0
    remaining = n_v - 1
    nbrs = [g.neighbors(v) for v in range(n_v)]
    degs = [len(x) for x in nbrs]
    cur = start
    t = 0
    chunk = 8192
    draws = rng.random(chunk)
    di = 0
    while remaining:
        t += 1
        if t > step_budget:
            raise BudgetExceededError("cover-walk step budget exceeded")
        if di == chunk:
            draws = rng.random(chunk)
            di = 0
        cur = nbrs[cur][int(draws[di] * degs[cur])]
        di += 1
        if hit[cur] < 0:
            hit[cur] = t
            remaining -= 1
    return hit


def decision_wrap(inst: Instance, bit: int) -> Instance:
    """Attach an answer bit to the designated minimum (same values)."""
    if inst.minimum is None:
        raise ValueError("decision_wrap needs a designated minimum")
    if bit not in (0, 1):
        raise ValueError("answer bit must be 0 or 1")
    return replace(inst, answer_bit=bit)
