"""Graph families for black-box local search: hypercube, grid, line, complete.

Vertices are canonical integer indices in [0, N).  Hypercube vertices are
bit strings (bit i of the index is coordinate i); grid vertices are 1-based
mixed-radix tuples with coordinate 0 least significant.  Grids do not wrap
at the boundaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

MAX_VERTICES = 2**32


@dataclass(frozen=True)
class Hypercube:
    n: int


@dataclass(frozen=True)
class Grid:
    d: int
    side: int


@dataclass(frozen=True)
class Line:
    num: int


@dataclass(frozen=True)
class Complete:
    num: int


GraphKind = Union[Hypercube, Grid, Line, Complete]


def kind_to_json(kind: GraphKind) -> dict:
    if isinstance(kind, Hypercube):
        return {"family": "hypercube", "n": kind.n}
    if isinstance(kind, Grid):
        return {"family": "grid", "d": kind.d, "side": kind.side}
    if isinstance(kind, Line):
        return {"family": "line", "N": kind.num}
    if isinstance(kind, Complete):
        return {"family": "complete", "N": kind.num}
    raise TypeError(f"not a GraphKind: {kind!r}")


def kind_from_json(obj: dict) -> GraphKind:
    fam = obj["family"]
    if fam == "hypercube":
        return Hypercube(int(obj["n"]))
    if fam == "grid":
        return Grid(int(obj["d"]), int(obj["side"]))
    if fam == "line":
        return Line(int(obj["N"]))
    if fam == "complete":
        return Complete(int(obj["N"]))
    raise ValueError(f"unknown graph family: {fam!r}")


class Graph:
    """Immutable handle over one graph family; all methods are pure."""

    def __init__(self, kind: GraphKind):
        self.kind = kind
        if isinstance(kind, Hypercube):
            if kind.n < 0:
                raise ValueError("hypercube dimension must be >= 0")
            if 2**kind.n > MAX_VERTICES:
                raise ValueError("hypercube too large")
            self.num_vertices = 2**kind.n
            self.max_degree = kind.n
        elif isinstance(kind, Grid):
            if kind.d < 1:
                raise ValueError("grid dimension must be >= 1")
            if kind.side < 2:
                raise ValueError("grid side must be >= 2")
            n_v = kind.side**kind.d
            if n_v > MAX_VERTICES:
                raise ValueError("grid too large")
            self.num_vertices = n_v
            self.max_degree = 2 * kind.d
        elif isinstance(kind, (Line, Complete)):
            if kind.num < 1:
                raise ValueError("vertex count must be >= 1")
            if kind.num > MAX_VERTICES:
                raise ValueError("graph too large")
            self.num_vertices = kind.num
            if isinstance(kind, Line):
                self.max_degree = 0 if kind.num == 1 else (1 if kind.num == 2 else 2)
            else:
                self.max_degree = kind.num - 1
        else:
            raise TypeError(f"not a GraphKind: {kind!r}")
        self._nbr_cache = None

    # -- coordinate views ---------------------------------------------------

    def coords(self, v: int) -> tuple:
        """Coordinate view of a canonical index (bits or 1-based tuple)."""
        self._check(v)
        k = self.kind
        if isinstance(k, Hypercube):
            return tuple((v >> i) & 1 for i in range(k.n))
        if isinstance(k, Grid):
            out = []
            for _ in range(k.d):
                out.append(v % k.side + 1)
                v //= k.side
            return tuple(out)
        return (v,)

    def index(self, coords) -> int:
        """Inverse of :meth:`coords`."""
        k = self.kind
        if isinstance(k, Hypercube):
            if len(coords) != k.n or any(b not in (0, 1) for b in coords):
                raise ValueError("bad hypercube coordinates")
            return sum(b << i for i, b in enumerate(coords))
        if isinstance(k, Grid):
            if len(coords) != k.d or any(not 1 <= c <= k.side for c in coords):
                raise ValueError("bad grid coordinates")
            v = 0
            for c in reversed(coords):
                v = v * k.side + (c - 1)
            return v
        (v,) = coords
        self._check(v)
        return v

    # -- core operations ----------------------------------------------------

    def neighbors(self, v: int) -> list[int]:
        """Exact neighbor set in ascending canonical-index order."""
        self._check(v)
        k = self.kind
        if isinstance(k, Hypercube):
            return sorted(v ^ (1 << i) for i in range(k.n))
        if isinstance(k, Grid):
            out = []
            step = 1
            rest = v
            for _ in range(k.d):
                c = rest % k.side
                if c > 0:
                    out.append(v - step)
                if c < k.side - 1:
                    out.append(v + step)
                step *= k.side
                rest //= k.side
            return sorted(out)
        if isinstance(k, Line):
            out = []
            if v > 0:
                out.append(v - 1)
            if v < k.num - 1:
                out.append(v + 1)
            return out
        return [u for u in range(k.num) if u != v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def distance(self, v: int, w: int) -> int:
        """Shortest-path distance (Hamming / L1 / |i-j| / 0-1)."""
        self._check(v)
        self._check(w)
        k = self.kind
        if isinstance(k, Hypercube):
            return int(v ^ w).bit_count()
        if isinstance(k, Grid):
            d = 0
            for _ in range(k.d):
                d += abs(v % k.side - w % k.side)
                v //= k.side
                w //= k.side
            return d
        if isinstance(k, Line):
            return abs(v - w)
        return 0 if v == w else 1

    def vertices(self) -> Iterator[int]:
        """All N vertices exactly once, in canonical order."""
        return iter(range(self.num_vertices))

    # -- vectorized helpers (dense instances, brute-force scans) -------------

    def distance_array(self, v: int) -> np.ndarray:
        """Distances from v to every vertex, as an int64 array."""
        self._check(v)
        k = self.kind
        idx = np.arange(self.num_vertices, dtype=np.int64)
        if isinstance(k, Hypercube):
            return np.bitwise_count(idx ^ v).astype(np.int64)
        if isinstance(k, Grid):
            d = np.zeros(self.num_vertices, dtype=np.int64)
            rest = idx
            w = v
            for _ in range(k.d):
                d += np.abs(rest % k.side - w % k.side)
                rest = rest // k.side
                w //= k.side
            return d
        if isinstance(k, Line):
            return np.abs(idx - v)
        return (idx != v).astype(np.int64)

    def neighbor_matrix(self) -> tuple[np.ndarray, np.ndarray]:
        """(indices, valid) arrays of shape (N, max_degree), cached.

        Row v lists the neighbors of v padded with v itself where the degree
        is below max_degree; `valid` marks real entries.
        """
        if self._nbr_cache is not None:
            return self._nbr_cache
        n_v, deg = self.num_vertices, self.max_degree
        idx = np.arange(n_v, dtype=np.int64)
        nbr = np.tile(idx[:, None], (1, max(deg, 1))) if deg else idx[:, None]
        valid = np.zeros((n_v, max(deg, 1)), dtype=bool)
        k = self.kind
        if isinstance(k, Hypercube):
            for i in range(k.n):
                nbr[:, i] = idx ^ (1 << i)
                valid[:, i] = True
        elif isinstance(k, Grid):
            step = 1
            rest = idx
            for i in range(k.d):
                c = rest % k.side
                lo = c > 0
                hi = c < k.side - 1
                nbr[:, 2 * i] = np.where(lo, idx - step, idx)
                valid[:, 2 * i] = lo
                nbr[:, 2 * i + 1] = np.where(hi, idx + step, idx)
                valid[:, 2 * i + 1] = hi
                step *= k.side
                rest = rest // k.side
        elif isinstance(k, Line):
            if n_v > 1:
                nbr[:, 0] = np.maximum(idx - 1, 0)
                valid[:, 0] = idx > 0
                if deg > 1:
                    nbr[:, 1] = np.minimum(idx + 1, n_v - 1)
                    valid[:, 1] = idx < n_v - 1
        else:  # Complete
            for i in range(deg):
                nbr[:, i] = np.where(idx <= i, i + 1, i)
                valid[:, i] = True
        self._nbr_cache = (nbr, valid)
        return self._nbr_cache

    def _check(self, v) -> None:
        if not 0 <= int(v) < self.num_vertices:
            raise ValueError(f"vertex {v} out of range [0, {self.num_vertices})")


def build_graph(kind: GraphKind) -> Graph:
    return Graph(kind)
