import json
import subprocess
import sys

import numpy as np
import pytest

from lslab.graphs import Hypercube, Line
from lslab.harness import (CSV_COLUMNS, EXPERIMENTS, ExperimentConfig,
                           emit_report, report_csv, run_experiment, trial_rng)


def cfg(**kw):
    base = dict(experiment="wsym", graph=Hypercube(3), params={"L": 5}, trials=1, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def test_trial_rng_deterministic_and_distinct():
    a = trial_rng(5, 3).integers(0, 2**30, 8)
    b = trial_rng(5, 3).integers(0, 2**30, 8)
    c = trial_rng(5, 4).integers(0, 2**30, 8)
    assert (a == b).all() and (a != c).any()


def test_config_json_round_trip():
    c = cfg(workers=2, fmt="json")
    assert ExperimentConfig.from_json(c.to_json()) == c


def test_config_rejects_unknown_experiment():
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"experiment": "nope"})
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig(experiment="nope"))


def test_same_config_same_csv():
    c = cfg(experiment="intersect", graph=Hypercube(8), params={"L": 4, "flicks": 50}, trials=5)
    r1 = run_experiment(c)
    r2 = run_experiment(c)
    assert report_csv(r1) == report_csv(r2)


def test_workers_do_not_change_output():
    c1 = cfg(experiment="solver-benchmark", graph=Hypercube(6), solver="steepest",
             params={"generator": "hitting-time"}, trials=6, workers=1)
    c2 = cfg(experiment="solver-benchmark", graph=Hypercube(6), solver="steepest",
             params={"generator": "hitting-time"}, trials=6, workers=2)
    assert report_csv(run_experiment(c1)) == report_csv(run_experiment(c2))


def test_empty_trials_header_only():
    c = cfg(experiment="solver-benchmark", graph=Line(8), solver="steepest", trials=0)
    text = report_csv(run_experiment(c))
    assert text.strip() == ",".join(CSV_COLUMNS)


def test_csv_rows_well_formed():
    c = cfg(experiment="goodness", graph=Hypercube(6), params={"L": 6, "flicks": 40}, trials=3)
    rep = run_experiment(c)
    lines = report_csv(rep).strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    for line in lines[1:]:
        parts = line.split(",")
        assert len(parts) == len(CSV_COLUMNS)
        assert parts[0] == "goodness"
        float(parts[-1])  # value parses


def test_adversary_table_rows():
    c = cfg(experiment="adversary-table", graph=None, params={"Ns": [2, 4]}, trials=1)
    rep = run_experiment(c)
    metrics = {(r["n_or_N"], r["metric"]): r["value"] for r in rep.records}
    assert metrics[(2, "upsilon_min")] == "1"
    assert metrics[(4, "upsilon_min")] == "1/2"
    assert metrics[(4, "upsilon_geom_sq")] == "1/2"


def test_emit_report_csv_and_json(tmp_path):
    c = cfg(trials=1)
    rep = run_experiment(c)
    p_csv = tmp_path / "out.csv"
    p_json = tmp_path / "out.json"
    emit_report(rep, str(p_csv))
    emit_report(rep, str(p_json), fmt="json")
    assert p_csv.read_text() == report_csv(rep)
    obj = json.loads(p_json.read_text())
    assert obj["config"]["experiment"] == "wsym"
    assert obj["annotation"]
    assert len(obj["records"]) == len(rep.records)


def test_all_experiments_run_small():
    cases = {
        "solver-benchmark": cfg(experiment="solver-benchmark", graph=Hypercube(4),
                                solver="random-sample", trials=2),
        "intersect": cfg(experiment="intersect", graph=Hypercube(6),
                         params={"L": 4, "flicks": 20}, trials=2),
        "sparse": cfg(experiment="sparse", graph=Hypercube(6),
                      params={"L": 6, "c": 3}, trials=2),
        "mixing": cfg(experiment="mixing", graph=Hypercube(3), params={}),
        "goodness": cfg(experiment="goodness", graph=Hypercube(6),
                        params={"L": 5, "flicks": 20}, trials=2),
        "wsym": cfg(trials=1),
        "subgraph": cfg(experiment="subgraph", graph=None, params={"m_max": 8}, trials=3),
        "adversary-table": cfg(experiment="adversary-table", graph=None,
                               params={"Ns": [2]}, trials=1),
    }
    assert set(cases) == set(EXPERIMENTS)
    for name, c in cases.items():
        rep = run_experiment(c)
        assert rep.annotation, name


def run_cli(*args, **kw):
    return subprocess.run([sys.executable, "-m", "lslab.cli", *args],
                          capture_output=True, text=True, **kw)


def test_cli_verify_pass_exit_zero():
    r = run_cli("verify", "--level", "quick", "--checks", "mixing,w-symmetry")
    assert r.returncode == 0, r.stdout + r.stderr
    assert "[PASS]" in r.stdout and "[FAIL]" not in r.stdout


def test_cli_bad_config_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"experiment": "nope"}')
    r = run_cli("sweep", "--config", str(bad), "--out", str(tmp_path / "x.csv"))
    assert r.returncode == 2
    r2 = run_cli("sweep", "--config", str(tmp_path / "missing.json"),
                 "--out", str(tmp_path / "y.csv"))
    assert r2.returncode == 2


def test_cli_sweep_deterministic(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({
        "experiment": "intersect",
        "graph": {"family": "hypercube", "n": 8},
        "params": {"L": 4, "flicks": 30},
        "trials": 3,
        "seed": 11,
    }))
    o1, o2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("sweep", "--config", str(conf), "--out", str(o1)).returncode == 0
    assert run_cli("sweep", "--config", str(conf), "--out", str(o2)).returncode == 0
    assert o1.read_text() == o2.read_text()


def test_cli_sweep_plot(tmp_path):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({
        "experiment": "solver-benchmark",
        "graph": {"family": "hypercube", "n": 5},
        "solver": "steepest",
        "trials": 4,
        "seed": 3,
    }))
    out = tmp_path / "bench.csv"
    r = run_cli("sweep", "--config", str(conf), "--out", str(out), "--plot")
    assert r.returncode == 0, r.stdout + r.stderr
    assert out.exists() and (tmp_path / "bench.png").exists()


def test_cli_adversary_json(tmp_path):
    out = tmp_path / "adv.json"
    r = run_cli("adversary", "--sizes", "4", "--out", str(out))
    assert r.returncode == 0
    assert "upsilon_min=1/2" in r.stdout
    obj = json.loads(out.read_text())
    assert obj["N=4"]["upsilon_min"] == "1/2"
