"""Config-driven ablation experiments: replications, regret, aggregation.

An experiment config (JSON) declares one objective, shared shot
parameters, and a list of arms (method x kernel x gamma x r x beta).
``run_experiment`` executes R seeded replications per arm -- the same
replication seeds are reused across arms, so arms differ only in
strategy -- and writes:

    out/manifest.json          config hash, seeds, ground-truth minimum
    out/runs/<arm>/rep_###.jsonl   one run log per replication
    out/<arm>.csv              aggregated regret (median, quartiles)
    out/regret.svg             combined plot, derived from the CSVs

Re-running the same config overwrites the same files deterministically.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .engine import (
    LSR,
    VANILLA,
    RunOptions,
    RunRecord,
    read_jsonl,
    run_arm,
)
from .kernels import MATERN, PERIODIC
from .objective import load_objective, objective_from_dict
from .stats import rank_sum_test
from .svgplot import render_regret_svg

_ARM_NAME = re.compile(r"^[A-Za-z0-9_.-]+$")

SEED_ENV_VAR = "SHOTLINE_SEED"


@dataclass(frozen=True)
class ArmConfig:
    name: str
    method: str  # vanilla | lsr
    kernel: str  # matern | periodic
    gamma: float
    r: float = 1.0
    beta: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    objective: dict
    arms: tuple
    s_high: int
    budget: int
    replications: int
    master_seed: int
    out_dir: str | None = None
    engine: RunOptions | None = None

    def build_objective(self):
        return objective_from_dict(self.objective)


@dataclass(frozen=True)
class RegretCurve:
    """Simple regret of one replication on its cumulative-shot axis.

    Entries are NaN while the run has no incumbent yet (low-shot
    initialization).  Raw values are kept: observation noise may push
    regret below zero, and no clamp is applied.
    """

    shots: np.ndarray
    regret: np.ndarray


def compute_regret(record: RunRecord, j_star: float) -> RegretCurve:
    """Incumbent-minus-optimum after each query, indexed by shots spent."""
    if j_star is None or not np.isfinite(j_star):
        raise ValueError("a finite ground-truth minimum is required")
    shots = np.array([q.spent for q in record.queries], dtype=float)
    regret = np.array([np.nan if q.incumbent_y is None
                       else q.incumbent_y - j_star
                       for q in record.queries], dtype=float)
    return RegretCurve(shots=shots, regret=regret)


# ---------------------------------------------------------------------------
# Config parsing
# ---------------------------------------------------------------------------

def _require(cfg: dict, key: str, what: str):
    if key not in cfg:
        raise ValueError(f"missing field '{key}' in {what}")
    return cfg[key]


def _reject_unknown(cfg: dict, allowed: set, what: str) -> None:
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(
            f"unknown field(s) in {what}: " + ", ".join(sorted(unknown)))


def parse_arm(cfg: dict, index: int) -> ArmConfig:
    what = f"arms[{index}]"
    _reject_unknown(cfg, {"name", "method", "kernel", "gamma", "r", "beta"},
                    what)
    method = _require(cfg, "method", what)
    kernel = _require(cfg, "kernel", what)
    if method not in (VANILLA, LSR):
        raise ValueError(f"{what}: method must be 'vanilla' or 'lsr'")
    if kernel not in (MATERN, PERIODIC):
        raise ValueError(f"{what}: kernel must be 'matern' or 'periodic'")
    gamma = float(_require(cfg, "gamma", what))
    r = float(cfg.get("r", 1.0))
    if not 0.0 < r <= 1.0:
        raise ValueError(f"{what}: r must be in (0, 1]")
    name = cfg.get("name", f"{method}-{kernel}")
    if not _ARM_NAME.match(name):
        raise ValueError(f"{what}: arm name {name!r} has unsafe characters")
    beta = cfg.get("beta")
    return ArmConfig(name=name, method=method, kernel=kernel, gamma=gamma,
                     r=r, beta=None if beta is None else float(beta))


def parse_experiment_config(cfg: dict, base_dir=".") -> ExperimentConfig:
    """Validate an experiment config dictionary; unknown fields rejected."""
    if not isinstance(cfg, dict):
        raise ValueError("experiment config must be a JSON object")
    allowed = {"objective", "arms", "s_high", "budget", "replications",
               "master_seed", "out_dir", "engine"}
    _reject_unknown(cfg, allowed, "experiment config")

    objective = _require(cfg, "objective", "experiment config")
    if isinstance(objective, str):
        obj = load_objective(Path(base_dir) / objective)
        objective = obj.as_dict()
    else:
        objective_from_dict(objective)  # validate now, fail early

    arms_cfg = _require(cfg, "arms", "experiment config")
    if not isinstance(arms_cfg, list) or not arms_cfg:
        raise ValueError("'arms' must be a non-empty list")
    arms = tuple(parse_arm(a, i) for i, a in enumerate(arms_cfg))
    names = [a.name for a in arms]
    if len(set(names)) != len(names):
        raise ValueError("arm names must be unique")

    s_high = int(_require(cfg, "s_high", "experiment config"))
    budget = int(_require(cfg, "budget", "experiment config"))
    replications = int(_require(cfg, "replications", "experiment config"))
    if replications < 1:
        raise ValueError("replications must be >= 1")
    master_seed = int(_require(cfg, "master_seed", "experiment config"))

    if budget < s_high:
        raise ValueError(f"budget {budget} cannot afford one {s_high}-shot "
                         "query")
    for arm in arms:
        if arm.method == VANILLA:
            if not 0.0 <= arm.gamma <= 1.0:
                raise ValueError(f"arm {arm.name!r}: vanilla gamma must be "
                                 "in [0, 1]")
        else:
            if not 0.0 < arm.gamma < 1.0:
                raise ValueError(f"arm {arm.name!r}: lsr gamma must be "
                                 "inside (0, 1)")
            s_low = max(1, int(round(arm.r * s_high)))
            if int(arm.gamma * budget // s_low) == 0:
                raise ValueError(f"arm {arm.name!r}: gamma fraction cannot "
                                 f"afford one {s_low}-shot query")

    engine = None
    if "engine" in cfg:
        eng_cfg = cfg["engine"]
        opt_fields = {f.name for f in fields(RunOptions)}
        _reject_unknown(eng_cfg, opt_fields, "engine config")
        engine = RunOptions(**eng_cfg)

    return ExperimentConfig(objective=objective, arms=arms, s_high=s_high,
                            budget=budget, replications=replications,
                            master_seed=master_seed,
                            out_dir=cfg.get("out_dir"), engine=engine)


def load_experiment_config(path) -> ExperimentConfig:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}, "
                             f"column {exc.colno}: {exc.msg}") from exc
    return parse_experiment_config(raw, base_dir=path.parent)


def config_hash(cfg: ExperimentConfig) -> str:
    """Stable content hash of the parsed configuration."""
    payload = {
        "objective": cfg.objective,
        "arms": [vars(a) for a in cfg.arms],
        "s_high": cfg.s_high,
        "budget": cfg.budget,
        "replications": cfg.replications,
        "master_seed": cfg.master_seed,
    }
    blob = json.dumps(payload, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def replication_seeds(master_seed: int, count: int):
    """Per-replication seeds, shared by every arm of the experiment."""
    return [int(np.random.SeedSequence((master_seed, rep)).generate_state(1)[0])
            for rep in range(count)]


# ---------------------------------------------------------------------------
# Execution
# ---------------------------------------------------------------------------

def _run_one(payload):
    """Worker: one (arm, replication) run, written to its JSONL path.

    BLAS pools are pinned to one thread: the GP matrices here are small
    enough that intra-op threading only adds contention, especially with
    several replications running side by side.
    """
    (obj_dict, arm_dict, seed, s_high, budget, out_path, engine_dict) = payload
    obj = objective_from_dict(obj_dict)
    arm = ArmConfig(**arm_dict)
    options = RunOptions(**engine_dict) if engine_dict else None
    with threadpool_limits(limits=1):
        record = run_arm(obj, arm.method, arm.kernel, arm.gamma, budget,
                         s_high, r=arm.r, beta=arm.beta, seed=seed,
                         options=options)
    record.write_jsonl(out_path)
    return out_path


def run_experiment(config, out_dir=None, seed_override: int | None = None,
                   jobs: int = 1):
    """Execute every arm x replication; aggregate; plot; write manifest.

    ``config`` is an :class:`ExperimentConfig`, a config dict, or a path
    to a JSON config file.  Seed precedence: ``seed_override`` argument,
    then the SHOTLINE_SEED environment variable, then the config value.
    Returns the results directory path.
    """
    if isinstance(config, (str, Path)):
        config = load_experiment_config(config)
    elif isinstance(config, dict):
        config = parse_experiment_config(config)

    master_seed = config.master_seed
    env_seed = os.environ.get(SEED_ENV_VAR)
    if env_seed is not None:
        master_seed = int(env_seed)
    if seed_override is not None:
        master_seed = int(seed_override)
    if master_seed != config.master_seed:
        config = ExperimentConfig(
            objective=config.objective, arms=config.arms,
            s_high=config.s_high, budget=config.budget,
            replications=config.replications, master_seed=master_seed,
            out_dir=config.out_dir, engine=config.engine)

    out = Path(out_dir or config.out_dir or "results")
    out.mkdir(parents=True, exist_ok=True)

    obj = config.build_objective()
    j_star, j_mode = obj.ground_truth_minimum()
    seeds = replication_seeds(master_seed, config.replications)

    tasks = []
    engine_dict = vars(config.engine) if config.engine else None
    for arm in config.arms:
        arm_dir = out / "runs" / arm.name
        arm_dir.mkdir(parents=True, exist_ok=True)
        for rep, seed in enumerate(seeds):
            tasks.append((obj.as_dict(), vars(arm), seed, config.s_high,
                          config.budget, str(arm_dir / f"rep_{rep:03d}.jsonl"),
                          engine_dict))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(_run_one, tasks))
    else:
        for t in tasks:
            _run_one(t)

    arm_curves = {}
    for arm in config.arms:
        agg = aggregate_arm(out, arm.name, config.replications, j_star)
        write_arm_csv(out / f"{arm.name}.csv", agg)
        arm_curves[arm.name] = agg

    render_regret_svg(arm_curves, out / "regret.svg")

    manifest = {
        "config_hash": config_hash(config),
        "master_seed": master_seed,
        "replication_seeds": seeds,
        "arms": [a.name for a in config.arms],
        "replications": config.replications,
        "j_star": j_star,
        "j_star_mode": j_mode,
        "s_high": config.s_high,
        "budget": config.budget,
    }
    with open(out / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def _arm_run_paths(results_dir, arm: str, replications: int | None = None):
    arm_dir = Path(results_dir) / "runs" / arm
    if not arm_dir.is_dir():
        raise ValueError(f"no runs directory for arm {arm!r}")
    paths = sorted(arm_dir.glob("rep_*.jsonl"))
    if replications is not None:
        paths = paths[:replications]
    if not paths:
        raise ValueError(f"no run logs found for arm {arm!r}")
    return paths


def aggregate_arm(results_dir, arm: str, replications: int, j_star: float):
    """Median and quartile regret across an arm's replications."""
    curves = []
    for p in _arm_run_paths(results_dir, arm, replications):
        curves.append(compute_regret(read_jsonl(p), j_star))
    shots = curves[0].shots
    for c in curves[1:]:
        if not np.array_equal(c.shots, shots):
            raise ValueError(f"arm {arm!r} replications disagree on the "
                             "cumulative-shot axis")
    mat = np.vstack([c.regret for c in curves])
    return {
        "shots": shots,
        "per_rep": mat,
        "median": np.median(mat, axis=0),
        "q25": np.quantile(mat, 0.25, axis=0),
        "q75": np.quantile(mat, 0.75, axis=0),
    }


def write_arm_csv(path, agg) -> None:
    """CSV aggregate: header row, LF endings, shortest round-trip floats.

    Rows where the arm has no incumbent yet (NaN regret) are omitted.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("shots,median_regret,q25,q75\n")
        for s, m, lo, hi in zip(agg["shots"], agg["median"], agg["q25"],
                                agg["q75"]):
            if np.isnan(m):
                continue
            fh.write(f"{int(s)},{float(m)!r},{float(lo)!r},{float(hi)!r}\n")


def regret_at_checkpoint(curve: RegretCurve, at_shots: float) -> float:
    """Regret of the last query issued at or before ``at_shots``."""
    idx = np.nonzero(curve.shots <= at_shots)[0]
    valid = [i for i in idx if not np.isnan(curve.regret[i])]
    if not valid:
        raise ValueError(f"no incumbent data at or before {at_shots} shots")
    return float(curve.regret[valid[-1]])


def compare_arms(results_dir, arm_a: str, arm_b: str, at_shots: float):
    """Median regret of two arms at a shot checkpoint plus rank-sum p.

    Requires at least 5 replications per arm and data at the checkpoint.
    Returns (median_a, median_b, p_value).
    """
    results_dir = Path(results_dir)
    with open(results_dir / "manifest.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if at_shots > manifest["budget"]:
        raise ValueError(f"checkpoint {at_shots} exceeds the experiment "
                         f"budget {manifest['budget']}")
    j_star = manifest["j_star"]
    samples = {}
    for arm in (arm_a, arm_b):
        paths = _arm_run_paths(results_dir, arm)
        if len(paths) < 5:
            raise ValueError(f"arm {arm!r} has {len(paths)} replications; "
                             "need at least 5 to compare")
        vals = [regret_at_checkpoint(compute_regret(read_jsonl(p), j_star),
                                     at_shots) for p in paths]
        samples[arm] = np.asarray(vals)
    res = rank_sum_test(samples[arm_a], samples[arm_b])
    return (float(np.median(samples[arm_a])),
            float(np.median(samples[arm_b])), res.p_value)
