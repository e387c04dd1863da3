"""Budgeted optimization loops over shot-noisy objectives.

Two drivers share the accounting rules:

* ``run_vanilla_bo`` -- spend a gamma fraction of the shot budget on
  uniform random high-shot queries, then alternate GP fit / acquisition
  minimization / high-shot query until another query is unaffordable.

* ``run_lsr_bo`` -- spend the gamma fraction on many cheap low-shot
  queries instead, fit a GP to them once, and freeze its posterior mean
  as a deterministic base function.  The optimization loop then models
  only the residual (high-shot value minus frozen base) and explores by
  the residual model's uncertainty alone.

Budget rule, both modes: a query is issued only while the remaining
budget still covers its full shot cost, so the total spend never
exceeds the budget.  Every run is bit-reproducible from (config, seed).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .acquisition import (
    LCB,
    LSR_LCB,
    AcquisitionSpec,
    FrozenMean,
    optimize_acquisition,
)
from .gp import FitConfig, FitResult, GpModel, fit_hyperparameters
from .kernels import TWO_PI, default_kernel_spec
from .objective import evaluate

VANILLA = "vanilla"
LSR = "lsr"

DEFAULT_BETA_LCB = 4.0
DEFAULT_BETA_LSR = 25.0


@dataclass
class BudgetLedger:
    """Shot accounting with an only-if-affordable issue rule."""

    total: int
    s_high: int
    s_low: int
    gamma: float
    spent: int = 0

    def __post_init__(self):
        if self.total < 1:
            raise ValueError("budget must be positive")
        if not 1 <= self.s_low <= self.s_high:
            raise ValueError("need 1 <= s_low <= s_high")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must be in [0, 1]")

    @property
    def ratio(self) -> float:
        return self.s_low / self.s_high

    def init_count(self) -> int:
        """Initialization queries affordable from the gamma fraction."""
        return int(self.gamma * self.total // self.s_low)

    def can_afford(self, shots: int) -> bool:
        return self.spent + shots <= self.total

    def charge(self, shots: int) -> None:
        if not self.can_afford(shots):
            raise RuntimeError("query exceeds the remaining shot budget")
        self.spent += shots

    def plan(self):
        """Closed-form (init, bo) query counts for this configuration."""
        m = self.init_count()
        n_bo = (self.total - m * self.s_low) // self.s_high
        return m, int(n_bo)


@dataclass(frozen=True)
class Query:
    phase: str  # "init" | "bo"
    k: int  # index within the phase
    theta: np.ndarray
    shots: int
    y: float
    incumbent_y: float | None
    spent: int  # cumulative shots after this query
    model: dict | None = None  # surrogate hyperparameters behind a bo query


@dataclass
class RunRecord:
    """Seeded trace of one optimization run."""

    config: dict
    seed: int
    queries: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)

    @property
    def incumbent_trace(self):
        return [q.incumbent_y for q in self.queries]

    @property
    def total_shots(self) -> int:
        return self.queries[-1].spent if self.queries else 0

    def jsonl_lines(self):
        """Serialize: header line with config + seed, one line per query."""
        yield json.dumps({"config": self.config, "seed": self.seed})
        for q in self.queries:
            rec = {
                "phase": q.phase,
                "k": q.k,
                "theta": [float(v) for v in q.theta],
                "shots": q.shots,
                "y": q.y,
                "incumbent_y": q.incumbent_y,
                "B_k": q.spent,
            }
            if q.model is not None:
                rec["model"] = q.model
            yield json.dumps(rec)

    def write_jsonl(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.jsonl_lines():
                fh.write(line + "\n")


def read_jsonl(path) -> RunRecord:
    """Load a run record written by :meth:`RunRecord.write_jsonl`."""
    with open(path, "r", encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        rec = RunRecord(config=header["config"], seed=header["seed"])
        for line in fh:
            d = json.loads(line)
            rec.queries.append(Query(
                phase=d["phase"], k=d["k"],
                theta=np.asarray(d["theta"]), shots=d["shots"], y=d["y"],
                incumbent_y=d["incumbent_y"], spent=d["B_k"],
                model=d.get("model")))
    return rec


def incumbent(record: RunRecord):
    """Best (lowest) budget-eligible observation of a run.

    Vanilla runs: every query is eligible.  Low-shot-residual runs: only
    optimization-phase (high-shot) queries count; a lucky low-shot init
    value is never the incumbent.
    """
    method = record.config.get("method", VANILLA)
    eligible = [q for q in record.queries
                if method == VANILLA or q.phase == "bo"]
    if not eligible:
        raise ValueError("record has no incumbent-eligible queries")
    best = min(eligible, key=lambda q: q.y)
    return best.theta, best.y


@dataclass(frozen=True)
class RunOptions:
    """Engine knobs that do not change the protocol itself."""

    nu: float = 2.5
    fit_restarts: int = 8
    refit_restarts: int = 1
    lowshot_fit_restarts: int = 3
    lowshot_fit_points: int = 400  # hyperparameter-search subsample cap
    pin_noise: bool = False  # pin GP noise to noise_scale / shots
    n_candidates: int = 256
    n_refine: int = 8
    refine_iters: int = 40


def _fit_or_default(X, y, family, cfg, rng, nu, warm):
    """Marginal-likelihood fit, or the unit prior when data is too thin.

    ``X`` must already have shape (n, d), including n = 0.
    """
    if len(y) < 2:
        kern = default_kernel_spec(family, X.shape[1], nu=nu)
        noise = cfg.fixed_noise_variance if cfg.fixed_noise_variance \
            is not None else 1e-4
        m0 = float(y[0]) if len(y) == 1 else 0.0
        return FitResult(kern, noise, m0, float("nan"))
    return fit_hyperparameters(X, y, family, config=cfg, rng=rng, nu=nu,
                               warm_start=warm)


def run_vanilla_bo(obj, kernel_family: str, gamma: float, budget: int,
                   s_high: int, beta: float = DEFAULT_BETA_LCB,
                   seed: int = 0, options: RunOptions | None = None) -> RunRecord:
    """Vanilla budgeted BO with gamma-fraction random initialization.

    With gamma = 1.0 the whole budget goes to uniform random sampling
    and no optimization iterations occur.
    """
    opts = options or RunOptions()
    if budget < s_high:
        raise ValueError("budget cannot afford a single query")
    ledger = BudgetLedger(total=budget, s_high=s_high, s_low=s_high,
                          gamma=gamma)
    rng = np.random.default_rng(seed)
    config = {
        "method": VANILLA,
        "objective": obj.as_dict(),
        "kernel_family": kernel_family,
        "gamma": gamma,
        "budget": budget,
        "s_high": s_high,
        "beta": beta,
    }
    record = RunRecord(config=config, seed=int(seed))

    X, ys = [], []
    best = None

    def push(phase, k, theta, sample, model_dict=None):
        nonlocal best
        ledger.charge(sample.shots)
        best = sample.value if best is None else min(best, sample.value)
        record.queries.append(Query(
            phase=phase, k=k, theta=theta, shots=sample.shots,
            y=sample.value, incumbent_y=best, spent=ledger.spent,
            model=model_dict))

    m = ledger.init_count()
    for k in range(m):
        theta = rng.uniform(0.0, TWO_PI, obj.dim)
        sample = evaluate(obj, theta, s_high, rng)
        X.append(theta)
        ys.append(sample.value)
        push("init", k, theta, sample)

    fit_cfg = FitConfig(
        restarts=opts.fit_restarts,
        fixed_noise_variance=(obj.noise_scale / s_high if opts.pin_noise
                              else None))
    warm = None
    k = 0
    while ledger.can_afford(s_high):
        t0 = time.perf_counter()
        cfg = fit_cfg if warm is None else \
            FitConfig(restarts=opts.refit_restarts, maxfev=120,
                      fixed_noise_variance=fit_cfg.fixed_noise_variance)
        fit = _fit_or_default(np.asarray(X, float).reshape(len(ys), obj.dim),
                              np.asarray(ys), kernel_family, cfg, rng,
                              opts.nu, warm)
        warm = fit if len(ys) >= 2 else None
        model = GpModel(fit.kernel, np.asarray(X, float).reshape(len(ys), obj.dim),
                        np.asarray(ys), noise_variance=fit.noise_variance,
                        mean_const=fit.mean_const)
        acq = AcquisitionSpec(LCB, beta, model)
        theta = optimize_acquisition(acq, obj.dim, rng,
                                     n_candidates=opts.n_candidates,
                                     n_refine=opts.n_refine,
                                     iters=opts.refine_iters)
        sample = evaluate(obj, theta, s_high, rng)
        X.append(theta)
        ys.append(sample.value)
        push("bo", k, theta, sample, model_dict=model.hyperparameters())
        record.wall_times.append(time.perf_counter() - t0)
        k += 1

    return record


def run_lsr_bo(obj, kernel_family: str, gamma: float, budget: int,
               s_high: int, s_low: int, beta: float = DEFAULT_BETA_LSR,
               seed: int = 0, options: RunOptions | None = None) -> RunRecord:
    """Low-shot-residual BO: frozen cheap-data base model plus residual GP.

    Phase 1 spends the gamma fraction on floor(gamma * budget / s_low)
    uniform low-shot queries and freezes the fitted posterior mean.
    Phase 2 iterates: fit the residual GP to (theta_i, y_i - base(theta_i))
    over the high-shot observations, minimize the residual-uncertainty
    acquisition, query at full shots.
    """
    opts = options or RunOptions()
    if not 0.0 < gamma < 1.0:
        raise ValueError("lsr mode needs gamma strictly inside (0, 1)")
    if s_low > s_high:
        raise ValueError("s_low cannot exceed s_high")
    ledger = BudgetLedger(total=budget, s_high=s_high, s_low=s_low,
                          gamma=gamma)
    m = ledger.init_count()
    if m == 0:
        raise ValueError("gamma fraction cannot afford one low-shot query")
    rng = np.random.default_rng(seed)
    config = {
        "method": LSR,
        "objective": obj.as_dict(),
        "kernel_family": kernel_family,
        "gamma": gamma,
        "budget": budget,
        "s_high": s_high,
        "s_low": s_low,
        "beta": beta,
    }
    record = RunRecord(config=config, seed=int(seed))

    best = None

    def push(phase, k, theta, sample, model_dict=None):
        nonlocal best
        ledger.charge(sample.shots)
        if phase == "bo":
            best = sample.value if best is None else min(best, sample.value)
        record.queries.append(Query(
            phase=phase, k=k, theta=theta, shots=sample.shots,
            y=sample.value, incumbent_y=best, spent=ledger.spent,
            model=model_dict))

    X_low, y_low = [], []
    for k in range(m):
        theta = rng.uniform(0.0, TWO_PI, obj.dim)
        sample = evaluate(obj, theta, s_low, rng)
        X_low.append(theta)
        y_low.append(sample.value)
        push("init", k, theta, sample)

    low_cfg = FitConfig(
        restarts=opts.lowshot_fit_restarts,
        max_fit_points=opts.lowshot_fit_points,
        fixed_noise_variance=(obj.noise_scale / s_low if opts.pin_noise
                              else None))
    low_fit = _fit_or_default(np.asarray(X_low), np.asarray(y_low),
                              kernel_family, low_cfg, rng, opts.nu, None)
    low_model = GpModel(low_fit.kernel, np.asarray(X_low), np.asarray(y_low),
                        noise_variance=low_fit.noise_variance,
                        mean_const=low_fit.mean_const)
    base = FrozenMean(low_model)

    resid_cfg = FitConfig(
        restarts=opts.fit_restarts,
        mean_mode="zero",
        fixed_noise_variance=(obj.noise_scale / s_high if opts.pin_noise
                              else None))
    X_hi, y_hi = [], []
    warm = None
    k = 0
    while ledger.can_afford(s_high):
        t0 = time.perf_counter()
        resid_targets = (np.asarray(y_hi)
                         - base(np.asarray(X_hi).reshape(len(y_hi), obj.dim))
                         if y_hi else np.asarray([]))
        cfg = resid_cfg if warm is None else \
            FitConfig(restarts=opts.refit_restarts, mean_mode="zero",
                      maxfev=120,
                      fixed_noise_variance=resid_cfg.fixed_noise_variance)
        fit = _fit_or_default(
            np.asarray(X_hi, float).reshape(len(y_hi), obj.dim),
            resid_targets, kernel_family, cfg, rng, opts.nu, warm)
        warm = fit if len(y_hi) >= 2 else None
        resid_model = GpModel(
            fit.kernel, np.asarray(X_hi, float).reshape(len(y_hi), obj.dim),
            resid_targets, noise_variance=fit.noise_variance,
            mean_const=fit.mean_const)
        acq = AcquisitionSpec(LSR_LCB, beta, resid_model, frozen_mean=base)
        theta = optimize_acquisition(acq, obj.dim, rng,
                                     n_candidates=opts.n_candidates,
                                     n_refine=opts.n_refine,
                                     iters=opts.refine_iters)
        sample = evaluate(obj, theta, s_high, rng)
        X_hi.append(theta)
        y_hi.append(sample.value)
        push("bo", k, theta, sample, model_dict=resid_model.hyperparameters())
        record.wall_times.append(time.perf_counter() - t0)
        k += 1

    return record


def run_arm(obj, method: str, kernel_family: str, gamma: float, budget: int,
            s_high: int, r: float = 1.0, beta: float | None = None,
            seed: int = 0, options: RunOptions | None = None) -> RunRecord:
    """Dispatch a single run from arm-level settings (r = s_low / s_high)."""
    if method == VANILLA:
        b = DEFAULT_BETA_LCB if beta is None else beta
        return run_vanilla_bo(obj, kernel_family, gamma, budget, s_high,
                              beta=b, seed=seed, options=options)
    if method == LSR:
        b = DEFAULT_BETA_LSR if beta is None else beta
        s_low = max(1, int(round(r * s_high)))
        return run_lsr_bo(obj, kernel_family, gamma, budget, s_high, s_low,
                          beta=b, seed=seed, options=options)
    raise ValueError(f"unknown method {method!r}")
