"""Exact adversary-bound computations on finite relation systems.

A relation system pairs a finite set of 0-inputs with a finite set of
1-inputs through a nonnegative relation matrix R.  From it we compute, in
exact rational arithmetic, the geometric-mean separation bound (quantum)
and the min separation bound (randomized), the permutation-inversion and
snake example systems, the weighted-subgraph pruning procedure, and the
progress-measure trace of a deterministic query policy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm, sqrt
from typing import Callable, Optional, Sequence

import numpy as np

from .instances import Instance
from .snakes import Snake, intersection_agreement, snake_instance


class DegenerateRelationError(ValueError):
    """Raised when some input has zero total relation weight."""


@dataclass
class RelationSystem:
    """Finite inputs A (0-side) and B (1-side) with relation R >= 0.

    Inputs are total maps position -> symbol, stored as tuples over a
    shared position list.  R is sparse: {(a_idx, b_idx): weight}.
    """

    positions: list
    a_inputs: list[tuple]
    b_inputs: list[tuple]
    relation: dict[tuple[int, int], Fraction]
    m_a: list[Fraction] = field(default_factory=list)
    m_b: list[Fraction] = field(default_factory=list)
    total: Fraction = Fraction(0)
    rows: list[list[tuple[int, Fraction]]] = field(default_factory=list)
    cols: list[list[tuple[int, Fraction]]] = field(default_factory=list)


@dataclass
class AdversaryReport:
    upsilon_geom_sq: Fraction  # exact square of the geometric-mean bound
    upsilon_min: Fraction
    witness_geom: tuple  # (a_idx, b_idx, position)
    witness_min: tuple
    randomized_bound: Fraction  # 1 / (5 * upsilon_min)
    quantum_bound_order: float  # 1 / upsilon_geom

    @property
    def upsilon_geom(self) -> float:
        return sqrt(self.upsilon_geom_sq)

    def to_json(self) -> dict:
        return {
            "upsilon_geom_sq": str(self.upsilon_geom_sq),
            "upsilon_geom": self.upsilon_geom,
            "upsilon_min": str(self.upsilon_min),
            "witness_geom": list(self.witness_geom),
            "witness_min": list(self.witness_min),
            "randomized_bound": str(self.randomized_bound),
            "quantum_bound_order": self.quantum_bound_order,
        }


@dataclass
class ProgressTrace:
    s_values: list[Fraction]  # S^(0) .. S^(T)
    increments: list[Fraction]
    w_a: set[int]
    w_b: set[int]
    success_weight_a: Fraction
    success_weight_b: Fraction


def build_relation_system(
    a_inputs: Sequence, b_inputs: Sequence, relation: dict
) -> RelationSystem:
    """Validate and index a relation system; rejects degenerate rows/columns."""
    a_inputs = [tuple(a) for a in a_inputs]
    b_inputs = [tuple(b) for b in b_inputs]
    if not a_inputs or not b_inputs:
        raise ValueError("both input sets must be nonempty")
    plen = len(a_inputs[0])
    for inp in itertools.chain(a_inputs, b_inputs):
        if len(inp) != plen:
            raise ValueError("inputs must share one position set")
    rel: dict[tuple[int, int], Fraction] = {}
    for (i, j), r in relation.items():
        if not isinstance(r, Fraction):
            r = Fraction(r)
        if r < 0:
            raise ValueError("relation weights must be nonnegative")
        if not (0 <= i < len(a_inputs) and 0 <= j < len(b_inputs)):
            raise ValueError("relation index out of range")
        if r > 0:
            rel[(i, j)] = r
    rows: list[list[tuple[int, Fraction]]] = [[] for _ in a_inputs]
    cols: list[list[tuple[int, Fraction]]] = [[] for _ in b_inputs]
    # accumulate masses over a common denominator so the hot loop is int-only
    den = lcm(*(r.denominator for r in rel.values())) if rel else 1
    acc_a = [0] * len(a_inputs)
    acc_b = [0] * len(b_inputs)
    for (i, j), r in rel.items():
        ri = r.numerator * (den // r.denominator)
        acc_a[i] += ri
        acc_b[j] += ri
        rows[i].append((j, r))
        cols[j].append((i, r))
    m_a = [Fraction(v, den) for v in acc_a]
    m_b = [Fraction(v, den) for v in acc_b]
    if any(x == 0 for x in m_a) or any(x == 0 for x in m_b):
        raise DegenerateRelationError("every input needs positive relation weight")
    total = sum(m_a, Fraction(0))
    return RelationSystem(
        positions=list(range(plen)),
        a_inputs=a_inputs,
        b_inputs=b_inputs,
        relation=rel,
        m_a=m_a,
        m_b=m_b,
        total=total,
        rows=rows,
        cols=cols,
    )


def theta(sys: RelationSystem, side: str, idx: int, x: int) -> Fraction:
    """theta(input, x): relation-weighted probability that a related input
    from the other side disagrees at position x."""
    if side == "A":
        a = sys.a_inputs[idx]
        num = sum(
            (r for j, r in sys.rows[idx] if sys.b_inputs[j][x] != a[x]), Fraction(0)
        )
        return num / sys.m_a[idx]
    if side == "B":
        b = sys.b_inputs[idx]
        num = sum(
            (r for i, r in sys.cols[idx] if sys.a_inputs[i][x] != b[x]), Fraction(0)
        )
        return num / sys.m_b[idx]
    raise ValueError("side must be 'A' or 'B'")


def upsilon_bounds(sys: RelationSystem) -> AdversaryReport:
    """Exact geometric-mean and min separation bounds over all qualifying
    (A, B, x) triples: R(A,B) > 0 and A(x) != B(x).

    Numerators are accumulated as lcm-scaled integers in one pass over the
    relation; Fractions only appear once per distinct (input, position).
    """


    scale = lcm(*(r.denominator for r in sys.relation.values()))
    num_a: dict[tuple[int, int], int] = {}
    num_b: dict[tuple[int, int], int] = {}
    triples: list[tuple[int, int, int]] = []
    for (i, j), r in sys.relation.items():
        a, b = sys.a_inputs[i], sys.b_inputs[j]
        ri = r.numerator * (scale // r.denominator)
        for x in range(len(a)):
            if a[x] != b[x]:
                num_a[(i, x)] = num_a.get((i, x), 0) + ri
                num_b[(j, x)] = num_b.get((j, x), 0) + ri
                triples.append((i, j, x))
    if not triples:
        raise ValueError("no qualifying (A, B, x) triple")
    # theta(input, x) = num/(scale*m); keep integer keys, floats for the
    # pre-pass, and build a Fraction only once per distinct value pair
    ma_key = [(m.numerator, m.denominator) for m in sys.m_a]
    mb_key = [(m.numerator, m.denominator) for m in sys.m_b]
    fa = {k: v * ma_key[k[0]][1] / (scale * ma_key[k[0]][0]) for k, v in num_a.items()}
    fb = {k: v * mb_key[k[0]][1] / (scale * mb_key[k[0]][0]) for k, v in num_b.items()}
    fg = max(fa[(i, x)] * fb[(j, x)] for i, j, x in triples)
    fm = max(min(fa[(i, x)], fb[(j, x)]) for i, j, x in triples)
    margin = 1e-9
    frac_cache: dict[tuple[int, int, int], Fraction] = {}

    def tfrac(v: int, mn_: int, md: int) -> Fraction:
        key = (v, mn_, md)
        f = frac_cache.get(key)
        if f is None:
            f = frac_cache[key] = Fraction(v * md, scale * mn_)
        return f

    best_geom = None
    best_min = None
    wit_geom = wit_min = None
    seen_geom: set = set()
    seen_min: set = set()
    for i, j, x in triples:
        ta_f, tb_f = fa[(i, x)], fb[(j, x)]
        if ta_f * tb_f >= fg - margin:
            key = (num_a[(i, x)], *ma_key[i], num_b[(j, x)], *mb_key[j])
            if key not in seen_geom:
                seen_geom.add(key)
                geom = tfrac(key[0], key[1], key[2]) * tfrac(key[3], key[4], key[5])
                if best_geom is None or geom > best_geom:
                    best_geom, wit_geom = geom, (i, j, x)
        if min(ta_f, tb_f) >= fm - margin:
            key = (num_a[(i, x)], *ma_key[i], num_b[(j, x)], *mb_key[j])
            if key not in seen_min:
                seen_min.add(key)
                ta = tfrac(key[0], key[1], key[2])
                tb = tfrac(key[3], key[4], key[5])
                mn = ta if ta <= tb else tb
                if best_min is None or mn > best_min:
                    best_min, wit_min = mn, (i, j, x)
    return AdversaryReport(
        upsilon_geom_sq=best_geom,
        upsilon_min=best_min,
        witness_geom=wit_geom,
        witness_min=wit_min,
        randomized_bound=Fraction(1, 1) / (5 * best_min),
        quantum_bound_order=1.0 / sqrt(best_geom),
    )


# ---------------------------------------------------------------------------
# example systems


def permutation_inversion_system(n: int) -> RelationSystem:
    """Inverting a permutation of {1..n}: 0-inputs place value 1 in the first
    half, 1-inputs in the second half; related pairs differ exactly at the
    two positions holding value 1."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    if n > 8:
        raise ValueError("exact mode enumerates n! permutations; n <= 8")
    a_inputs, b_inputs = [], []
    b_index: dict[tuple, int] = {}
    for perm in itertools.permutations(range(1, n + 1)):
        if perm.index(1) < n // 2:
            a_inputs.append(perm)
        else:
            b_index[perm] = len(b_inputs)
            b_inputs.append(perm)
    relation = {}
    for i, sigma in enumerate(a_inputs):
        pos1 = sigma.index(1)
        for x in range(n // 2, n):
            tau = list(sigma)
            tau[pos1], tau[x] = tau[x], tau[pos1]
            relation[(i, b_index[tuple(tau)])] = Fraction(1)
    return build_relation_system(a_inputs, b_inputs, relation)


def enumerate_hypercube_snakes(n: int, length: int, h: int = 0) -> list[Snake]:
    """Full support of D_{h,L}: one snake per outcome of the L-1 step coins."""
    from .graphs import Hypercube

    snakes = []
    for mask in range(2 ** (length - 1)):
        path = [0] * length
        path[length - 1] = h
        p = h
        for t in range(length - 1, 0, -1):
            if (mask >> (t - 1)) & 1:
                p ^= 1 << (t % max(n, 1))
            path[t - 1] = p
        snakes.append(Snake(Hypercube(n), tuple(path)))
    return snakes


def snake_weight_matrix(snakes: list[Snake]) -> dict[tuple[int, int], Fraction]:
    """w(X,Y) = p(X)/L * sum_j q_j(X,Y) over the full support, exactly.

    q_j(X,Y) = 2^-j when the paths agree on every index >= j, else 0.
    """
    length = snakes[0].length
    p = Fraction(1, 2 ** (length - 1))
    tail = [Fraction(0)] * (length + 1)  # tail[a] = sum_{j>=a} 2^-j
    for a in range(length - 1, -1, -1):
        tail[a] = tail[a + 1] + Fraction(1, 2**a)
    w: dict[tuple[int, int], Fraction] = {}
    for i, x in enumerate(snakes):
        for j_idx, y in enumerate(snakes):
            # smallest index from which the two paths agree to the head;
            # q_j is 2^-j for every j at or above it, zero below
            agree_from = length - 1
            while agree_from > 0 and x.path[agree_from - 1] == y.path[agree_from - 1]:
                agree_from -= 1
            w[(i, j_idx)] = p * tail[agree_from] / length
    return w


def snake_relation_system(n: int, length: int, h: int = 0):
    """Relation system of the snake decision problem on the hypercube.

    Positions are the 2^n vertices; each input is the tuple of
    (value, answer-bit-or-None) symbols of f_X (bit 0) or g_Y (bit 1).
    R(f_X, g_Y) = w(X, Y) where the intersection-agreement event E(X, Y)
    holds, else 0.  Returns (system, snakes, w).
    """
    if length > 14:
        raise ValueError("exact snake system enumerates 2^(L-1) snakes; L <= 14")
    snakes = enumerate_hypercube_snakes(n, length, h)
    w = snake_weight_matrix(snakes)

    def symbols(x: Snake, bit: int) -> tuple:
        inst: Instance = snake_instance(x)
        return tuple(
            (int(inst.values[v]), bit if v == x.path[0] else None)
            for v in range(2**n)
        )

    a_inputs = [symbols(x, 0) for x in snakes]
    b_inputs = [symbols(x, 1) for x in snakes]
    agree = {}
    for i, x in enumerate(snakes):
        for j, y in enumerate(snakes):
            if (i, j) in w:
                agree[(i, j)] = intersection_agreement(x, y)[1]
    relation = {k: v for k, v in w.items() if agree.get(k)}
    return build_relation_system(a_inputs, b_inputs, relation), snakes, w


# ---------------------------------------------------------------------------
# weighted subgraph pruning


def subgraph_prune(p: Sequence, w, r) -> set[int]:
    """Prune indices until every survivor i has sum_{j in U} w(i,j) >= r*p(i)/2.

    p: positive weights summing to 1; w: symmetric nonnegative matrix with
    total weight >= r.  Removal order: lowest index first.  The returned
    set is nonempty.
    """
    m = len(p)
    p = [Fraction(v) for v in p]
    if any(v <= 0 for v in p) or abs(sum(p) - 1) > Fraction(1, 10**9):
        raise ValueError("p must be positive and sum to 1")
    # scale to integers so the scan is pure int arithmetic; skip the
    # elementwise Fraction conversion when w is already integral


    int_w = all(isinstance(v, (int, np.integer)) for row in w for v in row)
    r = Fraction(r)
    if int_w:
        den = lcm(*(v.denominator for v in p), r.denominator)
        wi = [[int(v) * den for v in row] for row in w]
    else:
        wf = [[Fraction(v) for v in row] for row in w]
        den = lcm(*(v.denominator for v in p), r.denominator,
                  *(v.denominator for row in wf for v in row))
        wi = [[int(v * den) for v in row] for row in wf]
    pi = [int(v * den) for v in p]
    ri = int(r * den)
    for i in range(m):
        for j in range(i + 1, m):
            if wi[i][j] != wi[j][i]:
                raise ValueError("w must be symmetric")
        if any(v < 0 for v in wi[i]):
            raise ValueError("w must be nonnegative")
    if sum(map(sum, wi)) < ri:
        raise ValueError("total weight below r")
    alive = [True] * m
    rowsum = [sum(row) for row in wi]
    # survivor condition: 2*den*rowsum_i >= ri*pi[i]
    changed = True
    while changed:
        changed = False
        for i in range(m):
            if alive[i] and 2 * den * rowsum[i] < ri * pi[i]:
                alive[i] = False
                for j in range(m):
                    if alive[j]:
                        rowsum[j] -= wi[j][i]
                changed = True
                break
    out = {i for i in range(m) if alive[i]}
    assert out, "pruning emptied the set despite the weight precondition"
    return out


# ---------------------------------------------------------------------------
# progress-measure trace


def progress_trace(
    sys: RelationSystem,
    policy: Callable[[tuple], tuple],
    depth: int,
) -> ProgressTrace:
    """Simulate a deterministic query policy on every input and trace the
    global progress measure S^(t).

    The policy maps a transcript (tuple of (position, symbol) pairs) to
    ("query", position) or ("answer", bit).  A pair (A, B) counts as
    distinguished at step t when, by the t-th query on input A or on input
    B, the policy queried a position where they differ.
    """

    def run(inp: tuple) -> tuple[list[int], Optional[int]]:
        transcript: list[tuple[int, object]] = []
        queried: list[int] = []
        for _ in range(depth):
            action = policy(tuple(transcript))
            if action[0] == "answer":
                return queried, action[1]
            if action[0] != "query":
                raise ValueError(f"bad policy action: {action!r}")
            x = action[1]
            if not 0 <= x < len(inp):
                raise ValueError(f"policy queried invalid position {x}")
            queried.append(x)
            transcript.append((x, inp[x]))
        action = policy(tuple(transcript))
        answer = action[1] if action[0] == "answer" else None
        return queried, answer

    runs_a = [run(a) for a in sys.a_inputs]
    runs_b = [run(b) for b in sys.b_inputs]
    s = [Fraction(0)] * (depth + 1)
    for (i, j), r in sys.relation.items():
        a, b = sys.a_inputs[i], sys.b_inputs[j]
        first = None
        for t in range(depth):
            qa = runs_a[i][0]
            qb = runs_b[j][0]
            hit = (t < len(qa) and a[qa[t]] != b[qa[t]]) or (
                t < len(qb) and a[qb[t]] != b[qb[t]]
            )
            if hit:
                first = t + 1
                break
        if first is not None:
            for t in range(first, depth + 1):
                s[t] += r
    w_a = {i for i, (_, ans) in enumerate(runs_a) if ans == 0}
    w_b = {j for j, (_, ans) in enumerate(runs_b) if ans == 1}
    return ProgressTrace(
        s_values=s,
        increments=[s[t] - s[t - 1] for t in range(1, depth + 1)],
        w_a=w_a,
        w_b=w_b,
        success_weight_a=sum((sys.m_a[i] for i in w_a), Fraction(0)),
        success_weight_b=sum((sys.m_b[j] for j in w_b), Fraction(0)),
    )
