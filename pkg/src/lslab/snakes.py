"""Snake distributions on the hypercube and grid: sampling, tail-flicking,
sparseness and goodness diagnostics, and the induced hard instances.

A snake is a path x_0..x_{L-1} whose consecutive entries are equal or
adjacent; the head h = x_{L-1} is fixed and the tail end x_0 carries the
unique local minimum of the induced instance.  Generation runs from the
head downward: on the hypercube the step from index t to t-1 flips bit
(t mod n) with probability 1/2; on the grid, indices are grouped into
blocks of `side` consecutive entries, block T = floor(t/side) moves along
coordinate (T mod d) toward a uniformly re-randomized target, stalling
once the target is reached.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log
from typing import Optional

import numpy as np

from .graphs import Graph, GraphKind, Grid, Hypercube, build_graph, kind_to_json
from .instances import BudgetExceededError, Instance, enumeration_cap


@dataclass(frozen=True)
class Snake:
    kind: GraphKind
    path: tuple[int, ...]  # x_0 .. x_{L-1}

    @property
    def length(self) -> int:
        return len(self.path)

    @property
    def head(self) -> int:
        return self.path[-1]

    def first_hits(self) -> dict[int, int]:
        """Map vertex -> min{t : x_t = v}."""
        out: dict[int, int] = {}
        for t, v in enumerate(self.path):
            if v not in out:
                out[v] = t
        return out

    def head_hits(self) -> dict[int, int]:
        """Map vertex -> max{t : x_t = v}, the first visit in generation
        order (the path is grown from the head at index L-1 downward)."""
        return {v: t for t, v in enumerate(self.path)}

    def validate(self) -> None:
        g = build_graph(self.kind)
        if self.length < 1:
            raise ValueError("snake length must be >= 1")
        for a, b in zip(self.path, self.path[1:]):
            if a != b and g.distance(a, b) != 1:
                raise ValueError("consecutive snake entries must be equal or adjacent")

    def to_json(self) -> dict:
        return {
            "graph": kind_to_json(self.kind),
            "head": self.head,
            "L": self.length,
            "path": list(self.path),
        }


@dataclass(frozen=True)
class FlickResult:
    j: int
    snake: Snake
    s_xy: frozenset  # vertices of X∩Y whose first-visit indices coincide
    agree: bool  # the event X∩Y == S_{X,Y}


@dataclass(frozen=True)
class GridBlockState:
    """Conditional state of the partially observed block during a grid flick."""

    block: int
    direction: int
    start_value: int
    consistent: tuple[int, int]  # inclusive target range still possible
    stalled: bool


@dataclass(frozen=True)
class SparsenessReport:
    sparse: bool
    worst: tuple[int, int, int]  # (vertex, k, count) with the worst threshold ratio
    mu: tuple[float, ...]  # per-k expected counts
    c: float
    mode: str


# ---------------------------------------------------------------------------
# sampling


def sample_hypercube_snake(n: int, h: int, length: int, rng: np.random.Generator) -> Snake:
    """Draw from the head-to-tail coordinate-loop distribution D_{h,L}."""
    if length < 1:
        raise ValueError("L must be >= 1")
    build_graph(Hypercube(n))._check(h)
    path = [0] * length
    path[length - 1] = int(h)
    coins = rng.integers(0, 2, size=length - 1)
    p = int(h)
    for t in range(length - 1, 0, -1):
        if coins[t - 1]:
            p ^= 1 << (t % max(n, 1))
        path[t - 1] = p
    return Snake(Hypercube(n), tuple(path))


def sample_grid_snake(d: int, side: int, h: int, length: int, rng: np.random.Generator) -> Snake:
    """Draw from the blockwise grid snake distribution D_{h,L}."""
    if length < 1:
        raise ValueError("L must be >= 1")
    kind = Grid(d, side)
    build_graph(kind)._check(h)
    path = [0] * length
    path[length - 1] = int(h)
    _grid_regrow(path, length - 1, d, side, rng, state=None)
    return Snake(kind, tuple(path))


def _grid_regrow(path: list[int], j: int, d: int, side: int, rng, state) -> None:
    """Fill path[0..j-1] continuing the generating process from path[j].

    `state` carries the target-consistent range of the in-progress block,
    or None when index j-1 starts a fresh block.
    """
    coords = _grid_coords(path[j], d, side)
    cur_block = None
    target = None
    c = 0
    if state is not None:
        cur_block = state.block
        c = state.direction
        lo, hi = state.consistent
        target = int(rng.integers(lo, hi + 1))
    for t in range(j - 1, -1, -1):
        blk = t // side
        if blk != cur_block:
            cur_block = blk
            c = blk % d
            target = int(rng.integers(1, side + 1))
        if coords[c] < target:
            coords[c] += 1
        elif coords[c] > target:
            coords[c] -= 1
        path[t] = _grid_index(coords, side)


def _grid_coords(v: int, d: int, side: int) -> list[int]:
    out = []
    for _ in range(d):
        out.append(v % side + 1)
        v //= side
    return out


def _grid_index(coords, side: int) -> int:
    v = 0
    for c in reversed(coords):
        v = v * side + (c - 1)
    return v


def grid_block_state(x: Snake, j: int) -> Optional[GridBlockState]:
    """Conditional of the block containing index j-1, given path entries >= j.

    Returns None when index j-1 starts a fresh block (no constraints).
    The target of the in-progress block is uniform over the returned range:
    observed stalls pin it exactly; observed movement bounds it on one side.
    """
    kind = x.kind
    assert isinstance(kind, Grid)
    d, side = kind.d, kind.side
    if j == 0:
        return None
    blk = (j - 1) // side
    if j % side == 0 and j // side != blk:
        return None  # j is the entry of a fresh block
    c = blk % d
    entry = min(side * (blk + 1), x.length - 1)
    cur = _grid_coords(x.path[entry], d, side)[c]
    lo, hi = 1, side
    stalled = False
    direction = 0
    for t in range(entry - 1, j - 1, -1):
        nxt = _grid_coords(x.path[t], d, side)[c]
        if nxt == cur:
            lo = hi = cur
            stalled = True
        elif nxt == cur + 1:
            cur = nxt
            lo, hi = cur, side
            direction = 1
        else:
            cur = nxt
            lo, hi = 1, cur
            direction = -1
    return GridBlockState(
        block=blk,
        direction=c,
        start_value=_grid_coords(x.path[entry], d, side)[c],
        consistent=(lo, hi),
        stalled=stalled,
    )


# ---------------------------------------------------------------------------
# flicking


def flick_tail(x: Snake, rng: np.random.Generator, j: Optional[int] = None) -> FlickResult:
    """Resample indices below a uniform j from D_{h,L} conditioned on the
    suffix (entries at t >= j are kept fixed)."""
    length = x.length
    if j is None:
        j = int(rng.integers(length))
    path = list(x.path)
    if j > 0:
        if isinstance(x.kind, Hypercube):
            n = x.kind.n
            coins = rng.integers(0, 2, size=j)
            p = path[j]
            for t in range(j, 0, -1):
                if coins[t - 1]:
                    p ^= 1 << (t % max(n, 1))
                path[t - 1] = p
        elif isinstance(x.kind, Grid):
            _grid_regrow(path, j, x.kind.d, x.kind.side, rng, grid_block_state(x, j))
        else:
            raise ValueError("flicking is defined for hypercube and grid snakes")
    y = Snake(x.kind, tuple(path))
    s_xy, agree = intersection_agreement(x, y)
    return FlickResult(j=j, snake=y, s_xy=s_xy, agree=agree)


def intersection_agreement(x: Snake, y: Snake) -> tuple[frozenset, bool]:
    """S_{X,Y} and the event E(X,Y): X∩Y == S_{X,Y} as vertex sets.

    First-visit indices are taken in generation order, i.e. scanning from
    the head at index L-1 downward.  (Tail-side indices would flag the
    boundary vertex of almost every flick whenever one walk stalls there
    and the other steps away, putting the disagreement probability near
    1 - 2/L instead of the L^2/2^n enjoyed by genuine re-intersections.)
    """
    fx = x.head_hits()
    fy = y.head_hits()
    common = fx.keys() & fy.keys()
    s_xy = frozenset(v for v in common if fx[v] == fy[v])
    return s_xy, len(s_xy) == len(common)


def enumerate_flicks(x: Snake, j: int):
    """Exact enumeration of every regrowth outcome at a fixed j (hypercube).

    Yields (snake, probability) pairs with exact dyadic probabilities.
    """
    if not isinstance(x.kind, Hypercube):
        raise ValueError("exact flick enumeration is hypercube-only")
    n = x.kind.n
    prob = Fraction(1, 2**j)
    for mask in range(2**j):
        path = list(x.path)
        p = path[j]
        for t in range(j, 0, -1):
            if (mask >> (t - 1)) & 1:
                p ^= 1 << (t % max(n, 1))
            path[t - 1] = p
        yield Snake(x.kind, tuple(path)), prob


# ---------------------------------------------------------------------------
# coordinate-scan distance and sparseness


def delta_scan(x: int, v: int, i: int, kind: GraphKind) -> int:
    """Least k such that x and v agree on every coordinate outside the cyclic
    window {i, i-1, ..., i-k+1} (wrapping below 0 to the top)."""
    if isinstance(kind, Hypercube):
        m = kind.n
        diff = x ^ v
        positions = [b for b in range(m) if (diff >> b) & 1]
    elif isinstance(kind, Grid):
        m = kind.d
        xc = _grid_coords(x, m, kind.side)
        vc = _grid_coords(v, m, kind.side)
        positions = [b for b in range(m) if xc[b] != vc[b]]
    else:
        raise ValueError("delta_scan is defined for hypercube and grid")
    if not 0 <= i < m:
        raise ValueError("coordinate index out of range")
    if not positions:
        return 0
    return 1 + max((i - b) % m for b in positions)


def sparseness_check(
    x: Snake,
    c: float = 3.0,
    mode: str = "exact",
    v_count: int = 1024,
    rng: Optional[np.random.Generator] = None,
) -> SparsenessReport:
    """Count |{t : Δ(x_t, v, i_t) = k}| against the sparseness threshold.

    Hypercube: i_t = t mod n, threshold c*n*(n + L/2^(n-k)).
    Grid: i_t = floor(t/side) mod d, threshold (c*log N)*(side + L/N^(1-k/d)).
    """
    if isinstance(x.kind, Hypercube):
        return _sparseness_hypercube(x, c, mode, v_count, rng)
    if isinstance(x.kind, Grid):
        return _sparseness_grid(x, c, mode, v_count, rng)
    raise ValueError("sparseness is defined for hypercube and grid snakes")


def _sparseness_hypercube(x, c, mode, v_count, rng):
    n = x.kind.n
    length = x.length
    thresholds = [c * n * (n + length / 2 ** (n - k)) for k in range(n + 1)]
    mu = tuple((length / max(n, 1)) * 2**k / 2**n for k in range(n + 1))
    if mode == "exact":
        if (2**n) * length > enumeration_cap() * 8:
            raise BudgetExceededError("exact sparseness check over budget")
        counts = np.zeros((n + 1, 2**n), dtype=np.int64)
        # Δ(x_t, v, i) = k iff v agrees with x_t outside the k-window
        # {i..i-k+1} and differs at its deepest bit (i-k+1 mod n).
        submasks = [np.array([m for m in range(2**w)], dtype=np.int64) for w in range(n + 1)]
        for t, xt in enumerate(x.path):
            i = t % n
            counts[0, xt] += 1
            for k in range(1, n + 1):
                deep = (i - k + 1) % n
                base = xt ^ (1 << deep)
                window = [(i - r) % n for r in range(k - 1)]
                masks = submasks[k - 1]
                if window:
                    spread = np.zeros_like(masks)
                    for b, pos in enumerate(window):
                        spread |= ((masks >> b) & 1) << pos
                    np.add.at(counts[k], base ^ spread, 1)
                else:
                    counts[k, base] += 1
        worst = (0, 0, 0)
        worst_ratio = -1.0
        sparse = True
        for k in range(n + 1):
            top = int(counts[k].max())
            if top > thresholds[k]:
                sparse = False
            ratio = top / max(thresholds[k], 1e-300)
            if ratio > worst_ratio:
                worst_ratio = ratio
                worst = (int(counts[k].argmax()), k, top)
        return SparsenessReport(sparse=sparse, worst=worst, mu=mu, c=c, mode=mode)
    if mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        vs = rng.integers(0, 2**n, size=v_count)
        return _sampled_report(x, vs, n, thresholds, mu, c, "sampled")
    raise ValueError(f"unknown sparseness mode: {mode!r}")


def _sparseness_grid(x, c, mode, v_count, rng):
    kind = x.kind
    d, side = kind.d, kind.side
    n_v = side**d
    length = x.length
    thresholds = [
        c * log(n_v) * (side + length / n_v ** (1 - k / d)) for k in range(d + 1)
    ]
    mu = tuple((length / side) * n_v ** (k / d) / n_v for k in range(d + 1))
    if mode == "exact":
        if n_v * length > enumeration_cap() * 8:
            raise BudgetExceededError("exact sparseness check over budget")
        vs = np.arange(n_v)
    elif mode == "sampled":
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        vs = rng.integers(0, n_v, size=v_count)
    else:
        raise ValueError(f"unknown sparseness mode: {mode!r}")
    return _sampled_report(x, vs, d, thresholds, mu, c, mode, grid=True)


def _sampled_report(x, vs, m, thresholds, mu, c, mode, grid=False):
    kind = x.kind
    side = kind.side if grid else None
    counts: dict[tuple[int, int], int] = {}
    for t, xt in enumerate(x.path):
        i = ((t // side) % m) if grid else (t % m)
        # per-t deltas against the probed v set are cheap enough directly
        for v in vs:
            k = delta_scan(xt, int(v), i, kind)
            key = (int(v), k)
            counts[key] = counts.get(key, 0) + 1
    sparse = True
    worst = (0, 0, 0)
    worst_ratio = -1.0
    for (v, k), cnt in counts.items():
        if cnt > thresholds[k]:
            sparse = False
        ratio = cnt / max(thresholds[k], 1e-300)
        if ratio > worst_ratio:
            worst_ratio = ratio
            worst = (v, k, cnt)
    return SparsenessReport(sparse=sparse, worst=worst, mu=mu, c=c, mode=mode)


# ---------------------------------------------------------------------------
# goodness


def goodness_estimate(
    x: Snake,
    trials: int = 0,
    rng: Optional[np.random.Generator] = None,
    mode: str = "monte-carlo",
) -> tuple[float, float]:
    """Estimate (p_agree, eps_hat) for the tail-flick process:

    p_agree = Pr_{j,Y}[X∩Y = S_{X,Y}], and
    eps_hat = max_v Pr_{j,Y}[v ∈ Y[j]] with Y[j] = {y_0..y_j}.

    X counts as ε-good when p_agree >= 9/10 and eps_hat <= ε.
    """
    length = x.length
    if mode == "exact":
        if not isinstance(x.kind, Hypercube) or length > 20:
            raise BudgetExceededError("exact goodness needs a hypercube snake, L <= 20")
        agree_p = 0.0
        hit_p: dict[int, float] = {}
        for j in range(length):
            weight = 1.0 / (length * 2**j)
            for y, _prob in enumerate_flicks(x, j):
                _s, agree = intersection_agreement(x, y)
                if agree:
                    agree_p += weight
                for v in set(y.path[: j + 1]):
                    hit_p[v] = hit_p.get(v, 0.0) + weight
        return agree_p, max(hit_p.values())
    if mode == "monte-carlo":
        if rng is None or trials < 1:
            raise ValueError("monte-carlo mode needs an rng and trials >= 1")
        agree_n = 0
        hits: dict[int, int] = {}
        for _ in range(trials):
            res = flick_tail(x, rng)
            if res.agree:
                agree_n += 1
            for v in set(res.snake.path[: res.j + 1]):
                hits[v] = hits.get(v, 0) + 1
        return agree_n / trials, max(hits.values()) / trials
    raise ValueError(f"unknown goodness mode: {mode!r}")


# ---------------------------------------------------------------------------
# induced instance and mixing


def snake_instance(x: Snake) -> Instance:
    """f(v) = first-visit index on the path, else distance-to-head + L.

    Unique local minimum at x_0.
    """
    g = build_graph(x.kind)
    first = x.first_hits()
    length = x.length
    if g.num_vertices <= enumeration_cap():
        vals = g.distance_array(x.head) + length
        for v, t in first.items():
            vals[v] = t
        values, value_fn = vals.astype(np.int64), None
    else:
        head = x.head
        values = None

        def value_fn(v, _first=first, _g=g, _head=head, _len=length):
            t = _first.get(v)
            return t if t is not None else _g.distance(v, _head) + _len

    return Instance(
        kind=x.kind,
        values=values,
        value_fn=value_fn,
        minimum=x.path[0],
        meta={"generator": "snake", "L": length, "head": x.head, "unique-minimum": True},
    )


def mixing_check(kind: GraphKind, start: int, gap: int) -> float:
    """Max |p(v) - 1/N| for the exact state distribution of the generating
    process `gap` steps below a fixed state."""
    g = build_graph(kind)
    n_v = g.num_vertices
    if isinstance(kind, Hypercube):
        if kind.n > 16:
            raise BudgetExceededError("exact hypercube mixing needs n <= 16")
        dist = np.zeros(n_v)
        dist[start] = 1.0
        idx = np.arange(n_v)
        for t in range(gap, 0, -1):
            flipped = dist[idx ^ (1 << (t % kind.n))]
            dist = 0.5 * dist + 0.5 * flipped
        return float(np.abs(dist - 1.0 / n_v).max())
    if isinstance(kind, Grid):
        if n_v > 2**16:
            raise BudgetExceededError("exact grid mixing needs side^d <= 2^16")
        d, side = kind.d, kind.side
        dist = np.zeros(n_v)
        dist[start] = 1.0
        t = gap
        while t > 0:
            blk = (t - 1) // side
            lo = max(blk * side, 0)
            steps = t - lo  # destinations t-1 .. lo within this block
            c = blk % d
            trans = _block_transition(side, steps)
            shape = [side] * d
            arr = dist.reshape(shape[::-1])  # axis (d-1-c) is coordinate c
            arr = np.tensordot(arr, trans, axes=([d - 1 - c], [0]))
            arr = np.moveaxis(arr, -1, d - 1 - c)
            dist = arr.reshape(n_v)
            t = lo
        return float(np.abs(dist - 1.0 / n_v).max())
    raise ValueError("mixing_check is defined for hypercube and grid")


def _block_transition(side: int, steps: int) -> np.ndarray:
    """P[a-1, w-1] for a stalling walk of `steps` steps toward a uniform target."""
    trans = np.zeros((side, side))
    for a in range(1, side + 1):
        for u in range(1, side + 1):
            w = a + np.sign(u - a) * min(steps, abs(u - a))
            trans[a - 1, int(w) - 1] += 1.0 / side
    return trans
