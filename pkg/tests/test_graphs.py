import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lslab.graphs import (Complete, Grid, Hypercube, Line, build_graph,
                          kind_from_json, kind_to_json)

SMALL_KINDS = [
    Hypercube(1), Hypercube(3), Hypercube(5),
    Grid(d=1, side=5), Grid(d=2, side=3), Grid(d=3, side=4),
    Line(1), Line(2), Line(7),
    Complete(1), Complete(4), Complete(9),
]


def test_build_examples():
    g = build_graph(Hypercube(3))
    assert g.num_vertices == 8 and g.max_degree == 3
    g = build_graph(Grid(d=3, side=4))
    assert g.num_vertices == 64 and g.max_degree == 6
    g = build_graph(Line(1))
    assert g.num_vertices == 1 and g.max_degree == 0


def test_build_rejects_bad_params():
    with pytest.raises(ValueError):
        build_graph(Grid(d=2, side=1))
    with pytest.raises(ValueError):
        build_graph(Line(0))
    with pytest.raises(ValueError):
        build_graph(Hypercube(40))  # 2^40 > 2^32 cap


def test_neighbors_examples():
    g = build_graph(Hypercube(3))
    assert g.neighbors(0) == [1, 2, 4]
    g = build_graph(Grid(d=2, side=3))
    corner = g.index((1, 1))
    assert sorted(g.coords(v) for v in g.neighbors(corner)) == [(1, 2), (2, 1)]
    g = build_graph(Complete(4))
    assert g.neighbors(0) == [1, 2, 3]


def test_distance_examples():
    g = build_graph(Hypercube(4))
    assert g.distance(0b0000, 0b1011) == 3
    g = build_graph(Grid(d=3, side=4))
    assert g.distance(g.index((1, 1, 1)), g.index((4, 4, 4))) == 9
    for kind in SMALL_KINDS:
        gk = build_graph(kind)
        assert gk.distance(0, 0) == 0


def test_enumerate_vertices():
    assert list(build_graph(Hypercube(2)).vertices()) == [0, 1, 2, 3]
    assert list(build_graph(Line(3)).vertices()) == [0, 1, 2]
    g = build_graph(Grid(d=1, side=5))
    assert [g.coords(v) for v in g.vertices()] == [(i,) for i in range(1, 6)]


@pytest.mark.parametrize("kind", SMALL_KINDS)
def test_neighbor_symmetry_and_adjacency(kind):
    g = build_graph(kind)
    for v in g.vertices():
        nbr = g.neighbors(v)
        assert len(nbr) <= g.max_degree
        assert nbr == sorted(nbr) and len(set(nbr)) == len(nbr)
        for w in nbr:
            assert v in g.neighbors(w)
            assert g.distance(v, w) == 1
    assert any(len(g.neighbors(v)) == g.max_degree for v in g.vertices())


@pytest.mark.parametrize("kind", [Hypercube(3), Grid(d=2, side=4), Line(9),
                                  Complete(6), Grid(d=3, side=3)])
def test_triangle_inequality_small(kind):
    g = build_graph(kind)
    assert g.num_vertices <= 512
    dist = np.array([[g.distance(u, v) for v in g.vertices()]
                     for u in g.vertices()])
    assert (dist == dist.T).all()
    for k in g.vertices():  # d(u,v) <= d(u,k) + d(k,v) for all u,v,k
        assert (dist <= dist[:, [k]] + dist[[k], :]).all()


@pytest.mark.parametrize("kind", SMALL_KINDS)
def test_coords_index_roundtrip(kind):
    g = build_graph(kind)
    for v in g.vertices():
        assert g.index(g.coords(v)) == v


@given(st.integers(1, 16))
def test_hypercube_bit_coords(n):
    g = build_graph(Hypercube(n))
    v = (1 << (n - 1)) | 1 if n > 1 else 1
    coords = g.coords(v)
    assert coords[0] == 1
    assert coords[n - 1] == (1 if n > 1 else 1)


@settings(max_examples=50)
@given(st.integers(1, 4), st.integers(2, 6))
def test_grid_mixed_radix(d, side):
    g = build_graph(Grid(d=d, side=side))
    # coordinate 0 is least significant
    assert g.coords(0) == (1,) * d
    assert g.coords(1) == (2,) + (1,) * (d - 1)
    assert g.coords(g.num_vertices - 1) == (side,) * d


def test_kind_json_roundtrip():
    for kind in SMALL_KINDS:
        blob = kind_to_json(kind)
        assert kind_from_json(blob) == kind
    assert kind_to_json(Hypercube(12)) == {"family": "hypercube", "n": 12}
    assert kind_to_json(Grid(d=2, side=5)) == {"family": "grid", "d": 2, "side": 5}


def test_invalid_vertex_rejected():
    g = build_graph(Hypercube(3))
    with pytest.raises((ValueError, IndexError)):
        g.neighbors(8)
    with pytest.raises((ValueError, IndexError)):
        g.distance(0, -1)
