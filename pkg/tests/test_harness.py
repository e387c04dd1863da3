"""Harness tests: config validation, outputs, aggregation, determinism."""

import json
from pathlib import Path

import numpy as np
import pytest

from shotline.engine import read_jsonl
from shotline.harness import (
    aggregate_arm,
    compare_arms,
    compute_regret,
    config_hash,
    load_experiment_config,
    parse_experiment_config,
    regret_at_checkpoint,
    replication_seeds,
    run_experiment,
)

FAST_ENGINE = {"fit_restarts": 2, "refit_restarts": 1,
               "lowshot_fit_restarts": 1, "n_candidates": 32,
               "n_refine": 2, "refine_iters": 8}


def tiny_config(**overrides):
    cfg = {
        "objective": {"amplitudes": [1.0], "phases": [0.9],
                      "offset": 0.0, "noise_scale": 0.05},
        "arms": [{"name": "vanilla-periodic", "method": "vanilla",
                  "kernel": "periodic", "gamma": 0.4}],
        "s_high": 20,
        "budget": 100,
        "replications": 1,
        "master_seed": 7,
        "engine": dict(FAST_ENGINE),
    }
    cfg.update(overrides)
    return cfg


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def test_parse_minimal_config():
    cfg = parse_experiment_config(tiny_config())
    assert cfg.arms[0].name == "vanilla-periodic"
    assert cfg.s_high == 20


def test_unknown_top_level_field_rejected():
    with pytest.raises(ValueError, match="unknown field"):
        parse_experiment_config(tiny_config(budgets=10))


def test_unknown_arm_field_rejected():
    bad = tiny_config()
    bad["arms"][0]["kappa"] = 2.0
    with pytest.raises(ValueError, match=r"arms\[0\]"):
        parse_experiment_config(bad)


def test_missing_field_diagnostic():
    bad = tiny_config()
    del bad["s_high"]
    with pytest.raises(ValueError, match="s_high"):
        parse_experiment_config(bad)


def test_budget_arm_inconsistency_rejected():
    with pytest.raises(ValueError, match="afford"):
        parse_experiment_config(tiny_config(budget=10, s_high=20))
    bad = tiny_config(arms=[{"name": "l", "method": "lsr",
                             "kernel": "periodic", "gamma": 0.001,
                             "r": 1.0}])
    with pytest.raises(ValueError, match="afford"):
        parse_experiment_config(bad)
    bad = tiny_config(arms=[{"name": "l", "method": "lsr",
                             "kernel": "periodic", "gamma": 1.0, "r": 0.1}])
    with pytest.raises(ValueError, match="gamma"):
        parse_experiment_config(bad)


def test_duplicate_arm_names_rejected():
    bad = tiny_config()
    bad["arms"] = [bad["arms"][0], dict(bad["arms"][0])]
    with pytest.raises(ValueError, match="unique"):
        parse_experiment_config(bad)


def test_malformed_json_reports_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "objective": [,]\n}\n')
    with pytest.raises(ValueError, match="line 2"):
        load_experiment_config(p)


def test_objective_path_reference(tmp_path):
    obj_path = tmp_path / "obj.json"
    obj_path.write_text(json.dumps(
        {"amplitudes": [1.0], "phases": [0.0], "noise_scale": 0.1}))
    cfg_path = tmp_path / "cfg.json"
    cfg = tiny_config(objective="obj.json")
    cfg_path.write_text(json.dumps(cfg))
    parsed = load_experiment_config(cfg_path)
    assert parsed.objective["kind"] == "synthetic"


def test_config_hash_stable_and_sensitive():
    a = parse_experiment_config(tiny_config())
    b = parse_experiment_config(tiny_config())
    c = parse_experiment_config(tiny_config(master_seed=8))
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash(c)


def test_replication_seeds_deterministic():
    assert replication_seeds(7, 5) == replication_seeds(7, 5)
    assert replication_seeds(7, 5) != replication_seeds(8, 5)


# ---------------------------------------------------------------------------
# run_experiment outputs
# ---------------------------------------------------------------------------

def test_single_arm_tiny_budget_outputs(tmp_path):
    cfg = tiny_config(budget=60, s_high=20,
                      arms=[{"name": "a", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.0}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    logs = sorted((out / "runs" / "a").glob("*.jsonl"))
    assert len(logs) == 1
    rec = read_jsonl(logs[0])
    assert len(rec.queries) == 3  # 60 // 20
    assert (out / "a.csv").is_file()
    assert (out / "regret.svg").is_file()
    assert (out / "manifest.json").is_file()


def test_rerun_same_config_byte_identical(tmp_path):
    cfg = tiny_config(replications=2,
                      arms=[{"name": "v", "method": "vanilla",
                             "kernel": "matern", "gamma": 0.4},
                            {"name": "l", "method": "lsr",
                             "kernel": "periodic", "gamma": 0.2, "r": 0.1,
                             "beta": 25.0}])
    out1 = run_experiment(cfg, out_dir=tmp_path / "r1")
    out2 = run_experiment(cfg, out_dir=tmp_path / "r2")
    for rel in ["v.csv", "l.csv", "runs/v/rep_000.jsonl",
                "runs/v/rep_001.jsonl", "runs/l/rep_000.jsonl",
                "regret.svg"]:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def test_arms_differing_only_in_name_share_seeds(tmp_path):
    cfg = tiny_config(replications=2,
                      arms=[{"name": "first", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4},
                            {"name": "second", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    assert (out / "first.csv").read_bytes() == (out / "second.csv").read_bytes()


def test_seed_override_and_env(tmp_path, monkeypatch):
    cfg = tiny_config()
    out1 = run_experiment(cfg, out_dir=tmp_path / "a", seed_override=99)
    monkeypatch.setenv("SHOTLINE_SEED", "99")
    out2 = run_experiment(cfg, out_dir=tmp_path / "b")
    monkeypatch.delenv("SHOTLINE_SEED")
    out3 = run_experiment(cfg, out_dir=tmp_path / "c")
    a = (out1 / "vanilla-periodic.csv").read_bytes()
    b = (out2 / "vanilla-periodic.csv").read_bytes()
    c = (out3 / "vanilla-periodic.csv").read_bytes()
    assert a == b
    assert a != c  # master seed 7 vs 99


def test_parallel_jobs_identical_to_serial(tmp_path):
    cfg = tiny_config(replications=3)
    out1 = run_experiment(cfg, out_dir=tmp_path / "serial", jobs=1)
    out2 = run_experiment(cfg, out_dir=tmp_path / "par", jobs=2)
    assert (out1 / "vanilla-periodic.csv").read_bytes() == \
        (out2 / "vanilla-periodic.csv").read_bytes()


# ---------------------------------------------------------------------------
# Regret curves and aggregation
# ---------------------------------------------------------------------------

def test_compute_regret_definition(tmp_path):
    cfg = tiny_config(budget=80, s_high=20)
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    rec = read_jsonl(next((out / "runs" / "vanilla-periodic").glob("*.jsonl")))
    j_star = json.loads((out / "manifest.json").read_text())["j_star"]
    curve = compute_regret(rec, j_star)
    assert len(curve.shots) == len(rec.queries)
    for q, s, r in zip(rec.queries, curve.shots, curve.regret):
        assert s == q.spent
        assert r == q.incumbent_y - j_star


def test_regret_zero_when_incumbent_hits_optimum():
    from shotline.engine import Query, RunRecord
    rec = RunRecord(config={"method": "vanilla"}, seed=0)
    rec.queries = [
        Query("init", 0, np.array([0.0]), 10, y=-1.0, incumbent_y=-1.0,
              spent=10),
        Query("bo", 0, np.array([0.1]), 10, y=-0.5, incumbent_y=-1.0,
              spent=20),
    ]
    curve = compute_regret(rec, j_star=-1.0)
    assert list(curve.regret) == [0.0, 0.0]
    assert list(curve.shots) == [10.0, 20.0]


def test_regret_single_query():
    from shotline.engine import Query, RunRecord
    rec = RunRecord(config={"method": "vanilla"}, seed=0)
    rec.queries = [Query("init", 0, np.array([0.2]), 5, y=1.5,
                         incumbent_y=1.5, spent=5)]
    curve = compute_regret(rec, j_star=1.0)
    assert list(curve.shots) == [5.0]
    assert list(curve.regret) == [0.5]


def test_aggregate_matches_sort_oracle(tmp_path):
    cfg = tiny_config(replications=6, budget=100, s_high=20)
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    j_star = json.loads((out / "manifest.json").read_text())["j_star"]
    agg = aggregate_arm(out, "vanilla-periodic", 6, j_star)

    def sort_quantile(col, q):
        v = np.sort(np.asarray(col))
        h = (len(v) - 1) * q
        lo = int(np.floor(h))
        hi = int(np.ceil(h))
        return v[lo] + (h - lo) * (v[hi] - v[lo])

    for j in range(agg["per_rep"].shape[1]):
        col = agg["per_rep"][:, j]
        assert agg["median"][j] == pytest.approx(sort_quantile(col, 0.5))
        assert agg["q25"][j] == pytest.approx(sort_quantile(col, 0.25))
        assert agg["q75"][j] == pytest.approx(sort_quantile(col, 0.75))


def test_csv_format(tmp_path):
    cfg = tiny_config(budget=80, s_high=20)
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    raw = (out / "vanilla-periodic.csv").read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "shots,median_regret,q25,q75"
    row = lines[1].split(",")
    assert float(row[1]) == float(repr(float(row[1])))  # round-trips


def test_lsr_csv_skips_init_rows(tmp_path):
    cfg = tiny_config(
        budget=200, s_high=20,
        arms=[{"name": "lsr-p", "method": "lsr", "kernel": "periodic",
               "gamma": 0.2, "r": 0.1}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    lines = (out / "lsr-p.csv").read_text().splitlines()
    # 20 low-shot init queries are incumbent-less; only bo rows remain
    first_shots = int(lines[1].split(",")[0])
    assert first_shots == 0.2 * 200 + 20
    assert len(lines) - 1 == (200 - 40) // 20


def test_cross_arm_axis_endpoints_match(tmp_path):
    # arms with different gamma / r still end at the same cumulative
    # shot count (and never beyond the budget)
    cfg = tiny_config(
        budget=100, s_high=20, replications=2,
        arms=[{"name": "v", "method": "vanilla", "kernel": "periodic",
               "gamma": 0.4},
              {"name": "l", "method": "lsr", "kernel": "periodic",
               "gamma": 0.4, "r": 0.1}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    ends = []
    for arm in ("v", "l"):
        for p in (out / "runs" / arm).glob("*.jsonl"):
            rec = read_jsonl(p)
            assert rec.total_shots <= 100
            ends.append(rec.total_shots)
    assert len(set(ends)) == 1


def test_regret_at_checkpoint_semantics():
    from shotline.harness import RegretCurve
    curve = RegretCurve(shots=np.array([10.0, 20.0, 30.0]),
                        regret=np.array([np.nan, 0.5, 0.2]))
    assert regret_at_checkpoint(curve, 25) == 0.5
    assert regret_at_checkpoint(curve, 30) == 0.2
    with pytest.raises(ValueError):
        regret_at_checkpoint(curve, 12)  # only NaN rows that early


# ---------------------------------------------------------------------------
# compare_arms
# ---------------------------------------------------------------------------

def test_compare_identical_arms_p_one(tmp_path):
    cfg = tiny_config(replications=5,
                      arms=[{"name": "a", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4},
                            {"name": "b", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    med_a, med_b, p = compare_arms(out, "a", "b", at_shots=100)
    assert med_a == med_b
    assert p == 1.0


def test_compare_requires_five_replications(tmp_path):
    cfg = tiny_config(replications=3,
                      arms=[{"name": "a", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4},
                            {"name": "b", "method": "vanilla",
                             "kernel": "matern", "gamma": 0.4}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    with pytest.raises(ValueError, match="replication"):
        compare_arms(out, "a", "b", at_shots=100)


def test_compare_rejects_checkpoint_beyond_budget(tmp_path):
    cfg = tiny_config(replications=5,
                      arms=[{"name": "a", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4},
                            {"name": "b", "method": "vanilla",
                             "kernel": "matern", "gamma": 0.4}])
    out = run_experiment(cfg, out_dir=tmp_path / "res")
    with pytest.raises(ValueError, match="budget"):
        compare_arms(out, "a", "b", at_shots=10_000)


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_run_compare_regret(tmp_path, capsys):
    from shotline.cli import main

    cfg_path = tmp_path / "cfg.json"
    cfg = tiny_config(replications=5,
                      arms=[{"name": "a", "method": "vanilla",
                             "kernel": "periodic", "gamma": 0.4},
                            {"name": "b", "method": "vanilla",
                             "kernel": "matern", "gamma": 0.4}])
    cfg_path.write_text(json.dumps(cfg))
    out_dir = tmp_path / "out"

    assert main(["run", str(cfg_path), "--out", str(out_dir)]) == 0
    capsys.readouterr()

    assert main(["compare", str(out_dir), "a", "b", "--at-shots", "100"]) == 0
    text = capsys.readouterr().out
    assert "rank-sum p-value" in text

    run_log = next((out_dir / "runs" / "a").glob("*.jsonl"))
    assert main(["regret", str(run_log), "--jstar", "-1.0"]) == 0
    text = capsys.readouterr().out
    assert text.startswith("shots,regret")


def test_cli_reports_config_errors(tmp_path, capsys):
    from shotline.cli import main

    bad = tmp_path / "bad.json"
    bad.write_text("{not json}")
    assert main(["run", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
