from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lslab.graphs import Grid, Hypercube, build_graph
from lslab.harness import trial_rng
from lslab.instances import brute_force_minima
from lslab.snakes import (Snake, delta_scan, enumerate_flicks, flick_tail,
                          goodness_estimate, grid_block_state,
                          intersection_agreement, mixing_check,
                          sample_grid_snake, sample_hypercube_snake,
                          snake_instance, sparseness_check)


def test_sample_length_one():
    x = sample_hypercube_snake(3, 5, 1, trial_rng(0, 0))
    assert x.path == (5,)
    y = sample_grid_snake(2, 4, 3, 1, trial_rng(0, 0))
    assert y.path == (3,)


def test_single_coin_n1():
    seen = set()
    for t in range(64):
        x = sample_hypercube_snake(1, 0, 2, trial_rng(1, t))
        assert x.head == 0
        seen.add(x.path[0])
    assert seen == {0, 1}


def test_head_and_validity():
    for t in range(200):
        rng = trial_rng(2, t)
        x = sample_hypercube_snake(4, int(rng.integers(16)), 9, rng)
        assert x.head == x.path[-1]
        x.validate()
        y = sample_grid_snake(2, 3, int(rng.integers(9)), 7, rng)
        assert y.head == y.path[-1]
        y.validate()


def test_tail_mixes_to_uniform():
    # after 4n+1 entries the tail x_0 is exactly uniform; check empirically
    n = 4
    counts = np.zeros(16)
    trials = 4000
    for t in range(trials):
        x = sample_hypercube_snake(n, 0, 4 * n + 1, trial_rng(3, t))
        counts[x.path[0]] += 1
    # 5 sigma on a single cell
    p = counts / trials
    sigma = np.sqrt((1 / 16) * (15 / 16) / trials)
    assert np.abs(p - 1 / 16).max() < 5 * sigma


def test_grid_block_boundaries():
    d, side = 2, 4
    for t in range(100):
        rng = trial_rng(4, t)
        x = sample_grid_snake(d, side, int(rng.integers(16)), 12, rng)
        g = build_graph(Grid(d=d, side=side))
        for blk_edge in range(side, 12, side):
            a = g.coords(x.path[blk_edge])
            b = g.coords(x.path[blk_edge - 1])
            direction = (blk_edge - 1) // side % d
            for c in range(d):
                if c != direction:
                    assert a[c] == b[c]


def test_grid_line_example():
    # d=1, side=4: the block walks one unit per index toward its target,
    # stalling there; so consecutive coordinates never differ by > 1 and once
    # the walk stalls it stays put for the rest of the block
    for t in range(200):
        x = sample_grid_snake(1, 4, 0, 4, trial_rng(5, t))
        coords = [c + 1 for c in (v for v in x.path)]
        for a, b in zip(coords, coords[1:]):
            assert abs(a - b) <= 1
        stalled = False
        for hi, lo in zip(coords[::-1], coords[::-1][1:]):
            if stalled:
                assert hi == lo
            if hi == lo:
                stalled = True


def test_flick_j0_identity_and_suffix():
    rng = trial_rng(6, 0)
    x = sample_hypercube_snake(5, 3, 8, rng)
    res = flick_tail(x, rng, j=0)
    assert res.snake.path == x.path and res.agree
    for t in range(50):
        rng = trial_rng(6, t + 1)
        res = flick_tail(x, rng)
        assert res.snake.path[res.j:] == x.path[res.j:]
        assert res.s_xy <= (set(x.path) & set(res.snake.path))


def test_s_xy_symmetric():
    for t in range(100):
        rng = trial_rng(7, t)
        x = sample_hypercube_snake(4, int(rng.integers(16)), 7, rng)
        y = flick_tail(x, rng).snake
        s1, a1 = intersection_agreement(x, y)
        s2, a2 = intersection_agreement(y, x)
        assert s1 == s2 and a1 == a2


def test_enumerate_flicks_is_exact_conditional():
    rng = trial_rng(8, 0)
    x = sample_hypercube_snake(3, 2, 5, rng)
    for j in range(x.length):
        out = list(enumerate_flicks(x, j))
        assert len(out) == 2**j
        assert sum(p for _, p in out) == 1
        assert all(p == Fraction(1, 2**j) for _, p in out)
        assert len({y.path for y, _ in out}) == 2**j  # coin strings <-> paths
        for y, _ in out:
            assert y.path[j:] == x.path[j:]
            y.validate()


def test_delta_scan_examples():
    kind = Hypercube(4)
    assert delta_scan(0b0000, 0b0000, 2, kind) == 0
    assert delta_scan(0b0000, 0b0001, 0, kind) == 1
    assert delta_scan(0b0000, 0b1000, 0, kind) == 2  # wraps {0, 3}
    assert delta_scan(0b0000, 0b1111, 3, kind) == 4


def test_delta_scan_grid():
    kind = Grid(d=3, side=4)
    g = build_graph(kind)
    a = g.index((1, 1, 1))
    b = g.index((1, 2, 1))  # coordinate 1 differs
    assert delta_scan(a, a, 0, kind) == 0
    assert delta_scan(a, b, 1, kind) == 1
    assert delta_scan(a, b, 0, kind) == 3  # window grows {0},{0,2},{0,2,1}


def test_delta_scan_regrowth_hit_probability():
    # regrowing from x_j reaches v in exactly k steps with probability 2^-k
    # when delta_scan(x_j, v, j mod n) = k; exhaustive over n=3
    n, length = 3, 7
    rng = trial_rng(9, 0)
    x = sample_hypercube_snake(n, int(rng.integers(8)), length, rng)
    j = 4
    for v in range(8):
        k = delta_scan(x.path[j], v, j % n, Hypercube(n))
        if k == 0 or k > min(j, n):
            continue
        hits = sum(
            1 for y, _ in enumerate_flicks(x, j) if y.path[j - k] == v
        )
        assert Fraction(hits, 2**j) == Fraction(1, 2**k)


def test_sparseness_trivial_cases():
    x = Snake(Hypercube(4), (3,))
    rep = sparseness_check(x, c=1.0)
    assert rep.sparse
    rng = trial_rng(10, 0)
    y = sample_hypercube_snake(4, 0, 10, rng)
    rep = sparseness_check(y, c=3.0)
    assert rep.mode == "exact"
    # k=n threshold dominates: count L <= c*n*(n+L)
    assert rep.sparse or rep.worst[1] < 4


def test_sparse_fraction_pilot():
    # n=12, L=64, c=3: overwhelming majority of snakes are sparse
    sparse = 0
    trials = 50
    for t in range(trials):
        rng = trial_rng(11, t)
        x = sample_hypercube_snake(12, int(rng.integers(2**12)), 64, rng)
        sparse += sparseness_check(x, c=3.0).sparse
    assert sparse / trials >= 0.9


def test_goodness_trivial():
    x = Snake(Hypercube(4), (7,))
    p_agree, eps_hat = goodness_estimate(x, trials=10, rng=trial_rng(0, 0))
    assert p_agree == 1.0
    assert eps_hat == 1.0  # the head itself is hit whenever j = L-1 = 0


def test_goodness_exact_head_bound():
    rng = trial_rng(12, 0)
    x = sample_hypercube_snake(4, 9, 6, rng)
    p_agree, eps_hat = goodness_estimate(x, trials=0, rng=rng, mode="exact")
    assert eps_hat >= 1 / x.length  # head is in Y[L-1] always
    assert 0 <= p_agree <= 1


def test_snake_instance_values():
    rng = trial_rng(13, 0)
    x = sample_hypercube_snake(4, 11, 6, rng)
    inst = snake_instance(x)
    g = build_graph(Hypercube(4))
    assert inst.values[x.path[0]] == 0
    first = {}
    for t, v in enumerate(x.path):
        first.setdefault(v, t)
    for v, t in first.items():
        assert inst.values[v] == t
    for v in g.vertices():
        if v not in first:
            assert inst.values[v] == g.distance(v, x.head) + x.length
    assert brute_force_minima(g, inst.values) == {x.path[0]}


def test_snake_instance_length_one():
    x = Snake(Hypercube(3), (5,))
    inst = snake_instance(x)
    g = build_graph(Hypercube(3))
    assert inst.values[5] == 0
    assert all(inst.values[v] == g.distance(v, 5) + 1 for v in g.vertices() if v != 5)


def test_mixing_examples():
    assert mixing_check(Hypercube(4), 0, 4) <= 1e-12
    assert mixing_check(Hypercube(4), 0, 3) > 0
    assert mixing_check(Grid(d=2, side=4), 0, 8) <= 1e-12


def test_grid_block_state_fresh_vs_midblock():
    d, side = 2, 4
    rng = trial_rng(14, 0)
    x = sample_grid_snake(d, side, 5, 9, rng)
    assert grid_block_state(x, 0) is None
    assert grid_block_state(x, side) is None  # block boundary: fresh blocks below
    st_mid = grid_block_state(x, 2)
    if st_mid is not None:
        lo, hi = st_mid.consistent
        assert 1 <= lo <= hi <= side


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(1, 12), st.integers(0, 1000))
def test_snake_json_roundtrip(n, length, seed):
    rng = trial_rng(seed, 0)
    x = sample_hypercube_snake(n, int(rng.integers(2**n)), length, rng)
    blob = x.to_json()
    assert blob["head"] == x.head and blob["L"] == x.length
    assert tuple(blob["path"]) == x.path
