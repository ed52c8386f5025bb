"""End-to-end correctness battery.

Each check states a claim, runs at a `quick` or `full` scale, and reports
pass/fail with a one-line detail string.  The full scale is what the
acceptance tests pin; quick is a fast smoke pass for `lslab verify`.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import adversary, snakes, solvers
from .graphs import Complete, Graph, Grid, Hypercube, Line, build_graph
from .harness import random_prune_case, trial_rng
from .instances import (QueryOracle, brute_force_minima, hitting_time_instance,
                        staircase_instance)

# Pilot-fixed constants, frozen from full-scale pilot runs at seed 1:
# sampling-solver means were 320-335 against sqrt(N*delta) = 221.7 (ratio
# ~1.5), and the worst observed eps_hat*L/n^2 was 0.076 across n in 10..16.
RSD_QUERY_CONSTANT = 2.0   # mean random-sample-descent queries <= K*sqrt(N*delta)
GOODNESS_CONSTANT = 0.2    # eps_hat * L / n^2 stays below this for all snakes


@dataclass
class CheckResult:
    name: str
    claim: str
    passed: bool
    detail: str
    seconds: float


def _result(name, claim, passed, detail, t0) -> CheckResult:
    return CheckResult(name, claim, bool(passed), detail, time.perf_counter() - t0)


def check_adversary_exact(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    sizes = [2, 4, 6] if quick else [2, 4, 6, 8]
    bad = []
    for size in sizes:
        rep = adversary.upsilon_bounds(adversary.permutation_inversion_system(size))
        want = Fraction(2, size)
        if rep.upsilon_geom_sq != want or rep.upsilon_min != want:
            bad.append((size, rep.upsilon_geom_sq, rep.upsilon_min))
    return _result(
        "adversary-exact",
        "permutation inversion gives upsilon_geom^2 = upsilon_min = 2/N exactly",
        not bad,
        f"N in {sizes}: all exact" if not bad else f"mismatches: {bad}",
        t0,
    )


def check_unique_minimum(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    cases = []
    ns = [6, 8] if quick else [6, 8, 10, 12]
    per = 100 if quick else 1000
    for n in ns:
        cases.append((Hypercube(n), max(2, 2 ** (n // 2) // 4), per))
    cases.append((Grid(d=3, side=8), 11, per))
    bad = 0
    total = 0
    trial = 0
    for kind, length, count in cases:
        g = build_graph(kind)
        for _ in range(count):
            rng = trial_rng(seed, trial)
            trial += 1
            if isinstance(kind, Hypercube):
                x = snakes.sample_hypercube_snake(kind.n, int(rng.integers(g.num_vertices)), length, rng)
            else:
                x = snakes.sample_grid_snake(kind.d, kind.side, int(rng.integers(g.num_vertices)), length, rng)
            inst = snakes.snake_instance(x)
            mins = brute_force_minima(g, inst.values)
            total += 1
            if mins != {x.path[0]}:
                bad += 1
    return _result(
        "unique-minimum",
        "every snake instance has exactly one local minimum, at the snake's tail end",
        bad == 0,
        f"{total - bad}/{total} snakes had the unique minimum x_0",
        t0,
    )


def check_intersect(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    n, length = 16, 25
    snakes_count, flicks = (20, 500) if quick else (100, 1000)
    fails = total = 0
    for trial in range(snakes_count):
        rng = trial_rng(seed, trial)
        x = snakes.sample_hypercube_snake(n, int(rng.integers(2**n)), length, rng)
        for _ in range(flicks):
            total += 1
            if not snakes.flick_tail(x, rng).agree:
                fails += 1
    rate = fails / total
    bound = length**2 / 2**n + 0.005
    return _result(
        "intersect",
        "flicked snakes disagree with the original off the kept suffix with "
        "probability at most L^2/2^n",
        rate <= bound,
        f"disagree rate {rate:.5f} over {total} flicks (cap {bound:.5f})",
        t0,
    )


def check_mixing(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    details = []
    ok = True
    for n in (2, 3, 4):
        full = snakes.mixing_check(Hypercube(n), start=0, gap=n)
        short = snakes.mixing_check(Hypercube(n), start=0, gap=n - 1)
        details.append(f"n={n}: gap n dev {full:.2e}, gap n-1 dev {short:.2e}")
        ok = ok and full <= 1e-12 and short > 0
    return _result(
        "mixing",
        "the generating walk is exactly uniform after n steps and not before",
        ok,
        "; ".join(details),
        t0,
    )


def check_wsym(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    n, length = 4, 6
    snakes_list = adversary.enumerate_hypercube_snakes(n, length)
    w = adversary.snake_weight_matrix(snakes_list)
    m = len(snakes_list)
    sym = all(w.get((i, j)) == w.get((j, i)) for i in range(m) for j in range(i, m))
    total = sum(w.values(), Fraction(0))
    return _result(
        "w-symmetry",
        "the flick weight matrix is exactly symmetric with total weight 1",
        sym and total == 1,
        f"{m}x{m} pairs: symmetric={sym}, total={total}",
        t0,
    )


def _grid_flick_rejection_tv(d, side, length, samples, seed) -> float:
    """TV distance between flick_tail's regrown prefix (conditioned on j) and
    a rejection oracle that resamples whole snakes sharing the kept suffix."""
    rng = trial_rng(seed, 0)
    x = snakes.sample_grid_snake(d, side, int(rng.integers(side**d)), length, rng)
    j = length // 2
    flick_counts: dict = {}
    for _ in range(samples):
        res = snakes.flick_tail(x, rng, j=j)
        key = res.snake.path[:j]
        flick_counts[key] = flick_counts.get(key, 0) + 1
    # rejection oracle: resample fresh snakes with the same head, keep those
    # whose suffix from j matches
    rej_counts: dict = {}
    kept = 0
    suffix = x.path[j:]
    while kept < samples:
        y = snakes.sample_grid_snake(d, side, x.head, length, rng)
        if y.path[j:] == suffix:
            rej_counts[y.path[:j]] = rej_counts.get(y.path[:j], 0) + 1
            kept += 1
    keys = set(flick_counts) | set(rej_counts)
    return 0.5 * sum(
        abs(flick_counts.get(k, 0) - rej_counts.get(k, 0)) / samples for k in keys
    )


def check_flick_conditional(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    # hypercube: the flick law at fixed j must equal the conditional of the
    # full snake distribution given suffix agreement (exact dyadic arithmetic)
    hc_cases = [(3, 5)] if quick else [(3, 6), (6, 10)]
    details = []
    ok = True
    for n, length in hc_cases:
        rng = trial_rng(seed, n)
        x = snakes.sample_hypercube_snake(n, int(rng.integers(2**n)), length, rng)
        support = adversary.enumerate_hypercube_snakes(n, length, x.head)
        p_each = Fraction(1, 2 ** (length - 1))
        worst = Fraction(0)
        for j in range(length):
            cond = {y.path: Fraction(0) for y in support
                    if y.path[j:] == x.path[j:]}
            mass = p_each * len(cond)
            for path in cond:
                cond[path] = p_each / mass
            flick = {y.path: p for y, p in snakes.enumerate_flicks(x, j)}
            keys = cond.keys() | flick.keys()
            tv = sum(abs(cond.get(k, Fraction(0)) - flick.get(k, Fraction(0)))
                     for k in keys) / 2
            worst = max(worst, tv)
        ok = ok and worst == 0
        details.append(f"hypercube n={n} L={length}: max TV vs exact conditional "
                       f"= {float(worst):.1e}")
    samples = 20_000 if quick else 100_000
    tol = 0.05 if quick else 0.02
    tv = _grid_flick_rejection_tv(2, 4, 8, samples, seed)
    details.append(f"grid d=2 side=4 L=8: TV vs rejection oracle {tv:.4f} (tol {tol})")
    ok = ok and tv <= tol
    return _result(
        "flick-conditional",
        "regrowing below a flick point reproduces the conditional snake law",
        ok,
        "; ".join(details),
        t0,
    )


def check_subgraph(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    trials = 1000 if quick else 10_000
    bad = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        p, w, r = random_prune_case(rng)
        kept = adversary.subgraph_prune(p, w, r)
        good = bool(kept) and all(
            2 * Fraction(sum(w[i][j] for j in kept)) >= Fraction(r) * p[i]
            for i in kept
        )
        if not good:
            bad += 1
    return _result(
        "subgraph-prune",
        "pruning always leaves a nonempty set where every kept row retains "
        "weight at least r*p(i)/2",
        bad == 0,
        f"{trials - bad}/{trials} random instances satisfy the postcondition",
        t0,
    )


def check_progress(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    ok = True
    details = []
    # deterministic policy on the N=4 permutation system
    sys4 = adversary.permutation_inversion_system(4)
    rep4 = adversary.upsilon_bounds(sys4)

    def policy(transcript):
        nxt = len(transcript)
        if nxt < len(sys4.positions):
            return ("query", sys4.positions[nxt])
        return ("answer", 0)

    trace = adversary.progress_trace(sys4, policy, depth=len(sys4.positions))
    cap = 3 * rep4.upsilon_min * sys4.total
    mono = all(b >= a for a, b in zip(trace.s_values, trace.s_values[1:]))
    incr_ok = all(d <= cap for d in trace.increments)
    ok = ok and trace.s_values[0] == 0 and mono and incr_ok
    details.append(
        f"permutation N=4: S(0)={trace.s_values[0]}, monotone={mono}, "
        f"increments <= 3*upsilon_min*M={cap}"
    )

    systems = 20 if quick else 100
    bad = 0
    for trial in range(systems):
        rng = trial_rng(seed, trial)
        sys_r = _random_relation_system(rng)
        rep = adversary.upsilon_bounds(sys_r)
        order = list(sys_r.positions)
        rng.shuffle(order)

        def pol(transcript, order=order):
            k = len(transcript)
            if k < len(order):
                return ("query", order[k])
            return ("answer", 0)

        tr = adversary.progress_trace(sys_r, pol, depth=len(order))
        capr = 3 * rep.upsilon_min * sys_r.total
        if tr.s_values[0] != 0:
            bad += 1
        elif any(b < a for a, b in zip(tr.s_values, tr.s_values[1:])):
            bad += 1
        elif any(d > capr for d in tr.increments):
            bad += 1
    ok = ok and bad == 0
    details.append(f"{systems - bad}/{systems} random systems satisfy the invariants")
    return _result(
        "progress-measure",
        "the progress sum starts at 0, never decreases, and each query raises "
        "it by at most 3*upsilon_min*M",
        ok,
        "; ".join(details),
        t0,
    )


def _random_relation_system(rng) -> adversary.RelationSystem:
    n_pos = int(rng.integers(2, 5))
    alphabet = int(rng.integers(2, 4))
    n_a = int(rng.integers(1, 5))
    n_b = int(rng.integers(1, 5))
    a_inputs = [tuple(int(v) for v in rng.integers(alphabet, size=n_pos))
                for _ in range(n_a)]
    # each B input is an A input with one position flipped, so related pairs
    # with positive weight always have somewhere to be distinguished
    b_inputs = []
    sources = []
    for _ in range(n_b):
        src = int(rng.integers(n_a))
        base = list(a_inputs[src])
        pos = int(rng.integers(n_pos))
        base[pos] = (base[pos] + 1 + int(rng.integers(alphabet - 1))) % alphabet
        b_inputs.append(tuple(base))
        sources.append(src)
    rel = {}
    for i in range(n_a):  # cover every row and column
        rel[(i, int(rng.integers(n_b)))] = Fraction(int(rng.integers(1, 6)))
    for j, src in enumerate(sources):  # (src, j) always differ somewhere
        rel[(src, j)] = Fraction(int(rng.integers(1, 6)))
    for i in range(n_a):
        for j in range(n_b):
            if (i, j) not in rel and rng.random() < 0.4:
                rel[(i, j)] = Fraction(int(rng.integers(1, 6)))
    return adversary.build_relation_system(a_inputs, b_inputs, rel)


# --- solvers ---------------------------------------------------------------


def _random_values_instance(g: Graph, rng):
    from .instances import Instance
    vals = rng.permutation(g.num_vertices).astype(np.int64)
    mins = brute_force_minima(g, vals)
    return Instance(kind=g.kind, values=vals, minimum=int(min(mins)), meta={"generator": "random-permutation"})


def _mixed_case(rng):
    """Random (graph, instance) with N <= 2^12; sizes skew small so a large
    batch stays fast."""
    fam = rng.integers(4)
    if fam == 0:
        n = int(rng.integers(2, 13))
        if n > 9 and rng.random() < 0.7:
            n = int(rng.integers(2, 10))  # keep big cubes rare
        g = build_graph(Hypercube(n))
    elif fam == 1:
        d = int(rng.integers(1, 4))
        side = int(rng.integers(2, 9))
        g = build_graph(Grid(d=d, side=side))
    elif fam == 2:
        g = build_graph(Line(int(rng.integers(1, 65))))
    else:
        g = build_graph(Complete(int(rng.integers(2, 33))))
    gen = rng.integers(3)
    if gen == 0 and g.num_vertices <= 2**10:
        inst = hitting_time_instance(g, rng)
    elif gen == 1 and g.max_degree >= 1:
        inst = staircase_instance(g, int(rng.integers(g.num_vertices)), rng)
    else:
        inst = _random_values_instance(g, rng)
    return g, inst


def check_solvers(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    trials = 500 if quick else 10_000
    bad = 0
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        g, inst = _mixed_case(rng)
        mins = brute_force_minima(g, inst.values)
        runs = ["steepest", "random-sample"]
        if isinstance(g.kind, Line):
            runs.append("line-binary")
        for run in runs:
            oracle = QueryOracle(inst)
            if run == "steepest":
                res = solvers.steepest_descent(g, oracle, int(rng.integers(g.num_vertices)))
            elif run == "random-sample":
                res = solvers.random_sample_descent(g, oracle, rng)
            else:
                res = solvers.line_binary_search(g, oracle)
            if not res.verified or res.vertex not in mins:
                bad += 1
    details = [f"{trials} mixed instances, every applicable solver: {bad} failures"]
    ok = bad == 0

    # line binary search: small lines, walk-hitting-time and random values,
    # query cap honored on every run
    cap_bad = 0
    cap_total = 0
    line_sizes = range(1, 33) if quick else range(1, 65)
    for n_v in line_sizes:
        g = build_graph(Line(n_v))
        for t in range(10):
            rng = trial_rng(seed, 10_000_000 + n_v * 100 + t)
            if t % 2:
                inst = _random_values_instance(g, rng)
            else:
                inst = hitting_time_instance(g, rng)
            oracle = QueryOracle(inst)
            res = solvers.line_binary_search(g, oracle)
            cap_total += 1
            if (not res.verified or res.vertex not in brute_force_minima(g, inst.values)
                    or res.queries > solvers.line_query_cap(n_v)):
                cap_bad += 1
    ok = ok and cap_bad == 0
    details.append(f"line search within 2*ceil(log2 N)+3 queries on {cap_total} runs, {cap_bad} failures")

    # sampling solver cost: mean queries <= K*sqrt(N*delta), stable across seeds
    n = 12
    g = build_graph(Hypercube(n))
    target = (g.num_vertices * g.max_degree) ** 0.5
    means = []
    per_seed = 40 if quick else 200
    for s in range(5):
        total_q = 0
        for t in range(per_seed):
            rng = trial_rng(seed + 1000 + s, t)
            inst = hitting_time_instance(g, rng)
            res = solvers.random_sample_descent(g, QueryOracle(inst), rng)
            total_q += res.queries
        means.append(total_q / per_seed)
    grand = sum(means) / len(means)
    within = all(m <= RSD_QUERY_CONSTANT * target for m in means)
    stable = all(abs(m - grand) <= 0.2 * grand for m in means)
    ok = ok and within and stable
    details.append(
        f"sampling solver n=12: means {['%.0f' % m for m in means]} vs "
        f"K*sqrt(N*delta)={RSD_QUERY_CONSTANT * target:.0f}, stable={stable}"
    )
    return _result(
        "solvers",
        "classical solvers are zero-error and meet their query budgets",
        ok,
        "; ".join(details),
        t0,
    )


def check_goodness_scaling(seed: int = 0, quick: bool = False) -> CheckResult:
    t0 = time.perf_counter()
    ns = [10, 12] if quick else [10, 12, 14, 16]
    per_n = 10 if quick else 40
    flicks = 400 if quick else 1500
    details = []
    ok = True
    for n in ns:
        length = max(2, 2 ** (n // 2) // 4)
        scaled_max = 0.0
        agree_ok = 0
        for trial in range(per_n):
            rng = trial_rng(seed, n * 1000 + trial)
            x = snakes.sample_hypercube_snake(n, int(rng.integers(2**n)), length, rng)
            p_agree, eps_hat = snakes.goodness_estimate(x, trials=flicks, rng=rng)
            scaled_max = max(scaled_max, eps_hat * length / n**2)
            agree_ok += p_agree >= 0.9
        frac = agree_ok / per_n
        details.append(f"n={n}: max eps_hat*L/n^2 = {scaled_max:.3f}, "
                       f"p_agree>=0.9 for {frac:.0%}")
        ok = ok and scaled_max <= GOODNESS_CONSTANT and frac >= 0.9
    return _result(
        "goodness-scaling",
        "the worst-case hit probability of a flicked tail scales as n^2/L and "
        "suffix agreement holds with probability at least 9/10",
        ok,
        "; ".join(details),
        t0,
    )


ALL_CHECKS: dict[str, Callable[..., CheckResult]] = {
    "adversary-exact": check_adversary_exact,
    "unique-minimum": check_unique_minimum,
    "intersect": check_intersect,
    "mixing": check_mixing,
    "w-symmetry": check_wsym,
    "flick-conditional": check_flick_conditional,
    "subgraph-prune": check_subgraph,
    "progress-measure": check_progress,
    "solvers": check_solvers,
    "goodness-scaling": check_goodness_scaling,
}


def verify_suite(level: str = "quick", seed: int = 1,
                 names: list[str] | None = None) -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level: {level!r}")
    quick = level == "quick"
    results = []
    for name, fn in ALL_CHECKS.items():
        if names and name not in names:
            continue
        results.append(fn(seed=seed, quick=quick))
    return results
