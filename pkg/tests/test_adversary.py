from fractions import Fraction

import pytest

from lslab.adversary import (AdversaryReport, DegenerateRelationError,
                             build_relation_system, enumerate_hypercube_snakes,
                             permutation_inversion_system, progress_trace,
                             snake_relation_system, snake_weight_matrix,
                             subgraph_prune, theta, upsilon_bounds)


def test_build_rejects_degenerate():
    a = [(0, 1), (1, 0)]
    b = [(1, 1), (0, 0)]
    with pytest.raises(DegenerateRelationError):
        build_relation_system(a, b, {(0, 0): 1, (0, 1): 1})  # row 1 empty
    with pytest.raises(DegenerateRelationError):
        build_relation_system(a, b, {(0, 0): 1, (1, 0): 1})  # col 1 empty
    with pytest.raises(ValueError):
        build_relation_system(a, b, {(0, 0): -1})


def test_build_mass_bookkeeping():
    sys = build_relation_system(
        [(0, 0), (0, 1)], [(1, 0), (1, 1)],
        {(0, 0): 2, (0, 1): 1, (1, 0): 1, (1, 1): 3},
    )
    assert sys.m_a == [Fraction(3), Fraction(4)]
    assert sys.m_b == [Fraction(3), Fraction(4)]
    assert sys.total == 7
    assert sum(sys.m_a) == sum(sys.m_b) == sys.total


def test_theta_extremes():
    # all related inputs differ at position 0, none at position 1
    sys = build_relation_system([(0, 5)], [(1, 5), (2, 5)], {(0, 0): 1, (0, 1): 1})
    assert theta(sys, "A", 0, 0) == 1
    assert theta(sys, "A", 0, 1) == 0
    assert theta(sys, "B", 0, 0) == 1
    with pytest.raises(ValueError):
        theta(sys, "C", 0, 0)


def test_upsilon_all_theta_one():
    sys = build_relation_system([(0,)], [(1,)], {(0, 0): 1})
    rep = upsilon_bounds(sys)
    assert rep.upsilon_geom_sq == 1 and rep.upsilon_min == 1
    assert rep.randomized_bound == Fraction(1, 5)
    assert rep.quantum_bound_order == 1.0


def test_upsilon_requires_qualifying_triple():
    sys = build_relation_system([(0, 1)], [(0, 1)], {(0, 0): 1})
    with pytest.raises(ValueError):
        upsilon_bounds(sys)


def test_permutation_system_n4_shape():
    sys = permutation_inversion_system(4)
    assert len(sys.a_inputs) == len(sys.b_inputs) == 12
    assert sys.total == 24
    assert all(len(row) == 2 for row in sys.rows)
    assert all(len(col) == 2 for col in sys.cols)


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_permutation_upsilon_exact(n):
    rep = upsilon_bounds(permutation_inversion_system(n))
    assert rep.upsilon_geom_sq == Fraction(2, n)
    assert rep.upsilon_min == Fraction(2, n)
    assert rep.randomized_bound == Fraction(n, 10)


def test_permutation_theta_off_witness():
    # away from the position holding value 1, a related pair can only disagree
    # at the two swapped slots, so theta = (# disagreeing partners) / degree
    sys = permutation_inversion_system(4)
    for i, sigma in enumerate(sys.a_inputs):
        pos1 = sigma.index(1)
        for x in range(4):
            if x == pos1:
                continue
            assert theta(sys, "A", i, x) <= Fraction(2, 4)


def test_permutation_rejects_bad_n():
    with pytest.raises(ValueError):
        permutation_inversion_system(3)
    with pytest.raises(ValueError):
        permutation_inversion_system(10)


def test_snake_weights_sum_to_one():
    snakes = enumerate_hypercube_snakes(3, 5)
    w = snake_weight_matrix(snakes)
    assert sum(w.values()) == 1
    for i in range(len(snakes)):
        assert w[(i, i)] > 0
        for j in range(len(snakes)):
            assert w[(i, j)] == w[(j, i)]


def test_snake_system_builds_and_bounds():
    sys, snakes, w = snake_relation_system(3, 5)
    assert len(snakes) == 2**4
    rep = upsilon_bounds(sys)
    assert 0 < rep.upsilon_min <= 1 and rep.upsilon_geom_sq <= 1
    assert rep.upsilon_min**2 <= rep.upsilon_geom_sq
    # masked weights are a subset of the full matrix
    assert all(w[k] == v for k, v in sys.relation.items())


def test_subgraph_keeps_everything_at_r_zero():
    assert subgraph_prune([Fraction(1, 2), Fraction(1, 2)], [[1, 0], [0, 1]], 0) == {0, 1}


def test_subgraph_single_vertex():
    assert subgraph_prune([Fraction(1)], [[5]], 3) == {0}


def test_subgraph_two_vertex_trace():
    # row sums 1 and 0; survivor condition 2*rowsum >= r*p fails only for i=1
    out = subgraph_prune([Fraction(1, 2), Fraction(1, 2)], [[1, 0], [0, 0]], 1)
    assert out == {0}


def test_subgraph_postcondition_random():
    import numpy as np
    from lslab.harness import random_prune_case, trial_rng

    for t in range(200):
        p, w, r = random_prune_case(trial_rng(31, t), m_max=12)
        keep = subgraph_prune(p, w, r)
        for i in keep:
            s = sum(w[i][j] for j in keep)
            assert 2 * Fraction(s) >= Fraction(r) * p[i]


def test_subgraph_input_validation():
    with pytest.raises(ValueError):
        subgraph_prune([Fraction(1, 2), Fraction(1, 2)], [[0, 1], [2, 0]], 1)
    with pytest.raises(ValueError):
        subgraph_prune([Fraction(1, 2), Fraction(1, 2)], [[0, 0], [0, 0]], 1)
    with pytest.raises(ValueError):
        subgraph_prune([Fraction(1, 2), Fraction(1, 4)], [[1, 0], [0, 1]], 1)


def test_progress_zero_depth():
    sys = build_relation_system([(0,)], [(1,)], {(0, 0): 1})
    tr = progress_trace(sys, lambda t: ("answer", 0), 0)
    assert tr.s_values == [Fraction(0)]
    assert tr.increments == []
    assert tr.w_a == {0} and tr.w_b == set()


def test_progress_single_query_distinguishes():
    sys = build_relation_system([(0,)], [(1,)], {(0, 0): 1})

    def policy(tr):
        if not tr:
            return ("query", 0)
        return ("answer", tr[0][1])

    t = progress_trace(sys, policy, 1)
    assert t.s_values == [Fraction(0), Fraction(1)]
    assert t.success_weight_a == 1 and t.success_weight_b == 1


def test_progress_monotone_and_capped_on_permutations():
    sys = permutation_inversion_system(4)
    rep = upsilon_bounds(sys)

    def scan_policy(tr):
        if len(tr) < 4:
            return ("query", len(tr))
        pos1 = next(x for x, v in tr if v == 1)
        return ("answer", 0 if pos1 < 2 else 1)

    t = progress_trace(sys, scan_policy, 4)
    assert t.s_values[0] == 0
    for a, b in zip(t.s_values, t.s_values[1:]):
        assert b >= a
    for inc in t.increments:
        assert inc <= 3 * rep.upsilon_min * sys.total
    assert t.s_values[-1] == sys.total  # full scan separates every pair
