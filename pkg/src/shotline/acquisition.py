"""Lower-confidence-bound acquisition over the periodic angle box.

Two flavours:

* plain LCB on a single surrogate,  mu(theta) - sqrt(beta) * sigma(theta);
* residual LCB for the two-model decomposition, where the predicted
  objective is frozen_mean(theta) + residual_mean(theta) but only the
  residual model's standard deviation drives exploration.  The frozen
  low-fidelity model has spent its budget: its uncertainty can never be
  reduced, so it carries no exploration value.

The optimizer is deliberately derivative-free: uniform random candidates
followed by coordinate-wise pattern search with periodic wrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gp import GpModel
from .kernels import TWO_PI, wrap_angles

LCB = "lcb"
LSR_LCB = "lsr_lcb"

# Pattern-search defaults: candidates, refined starts, step schedule.
N_CANDIDATES = 256
N_REFINE = 8
REFINE_ITERS = 40
INITIAL_STEP = math.pi / 8
SHRINK = 0.5


def lcb_value(mu, var, beta: float):
    """mu - sqrt(beta) * sqrt(var), elementwise; var must be >= 0."""
    var = np.asarray(var, dtype=float)
    if np.any(var < 0):
        raise ValueError("negative variance")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return np.asarray(mu, dtype=float) - math.sqrt(beta) * np.sqrt(var)


def lsr_lcb_value(mu_low, mu_resid, var_resid, beta: float):
    """(mu_low + mu_resid) - sqrt(beta) * sqrt(var_resid).

    The low-shot model contributes only its mean; its variance never
    enters.
    """
    var_resid = np.asarray(var_resid, dtype=float)
    if np.any(var_resid < 0):
        raise ValueError("negative variance")
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    return (np.asarray(mu_low, dtype=float) + np.asarray(mu_resid, dtype=float)
            - math.sqrt(beta) * np.sqrt(var_resid))


class FrozenMean:
    """Deterministic snapshot of a fitted model's posterior mean.

    Wraps an immutable GpModel; repeated calls return bit-identical
    values no matter what happens elsewhere in the optimization loop.
    """

    def __init__(self, model: GpModel):
        self._model = model

    def __call__(self, queries) -> np.ndarray:
        return self._model.mean(queries)

    @property
    def dim(self) -> int:
        return self._model.kernel.dim


@dataclass(frozen=True)
class AcquisitionSpec:
    """Acquisition kind, exploration weight, and the models it reads.

    ``lcb`` reads a single ``model``; ``lsr_lcb`` reads the residual
    ``model`` plus a ``frozen_mean`` for the low-shot surrogate.
    """

    kind: str
    beta: float
    model: GpModel
    frozen_mean: FrozenMean | None = None

    def __post_init__(self):
        if self.kind not in (LCB, LSR_LCB):
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.kind == LSR_LCB and self.frozen_mean is None:
            raise ValueError("lsr_lcb requires a frozen low-shot mean")
        if self.kind == LCB and self.frozen_mean is not None:
            raise ValueError("lcb does not take a frozen mean")

    def values(self, queries) -> np.ndarray:
        """Acquisition value at each query row (lower is better)."""
        mu, var = self.model.posterior(queries)
        if self.kind == LCB:
            return lcb_value(mu, var, self.beta)
        return lsr_lcb_value(self.frozen_mean(queries), mu, var, self.beta)


def optimize_acquisition(acq: AcquisitionSpec, dim: int, rng,
                         n_candidates: int = N_CANDIDATES,
                         n_refine: int = N_REFINE,
                         iters: int = REFINE_ITERS,
                         initial_step: float = INITIAL_STEP) -> np.ndarray:
    """Minimize the acquisition over the box [0, 2*pi)^d.

    Draws ``n_candidates`` uniform points, then refines the best
    ``n_refine`` by coordinate-wise pattern search with periodic
    wrapping; the step halves after each sweep without improvement.
    Ties break toward the earliest generated candidate, so the result is
    deterministic given ``rng``.  A constant acquisition returns one of
    the candidates unchanged.
    """
    rng = np.random.default_rng(rng)
    cand = rng.uniform(0.0, TWO_PI, size=(n_candidates, dim))
    vals = acq.values(cand)
    order = np.argsort(vals, kind="stable")[:min(n_refine, n_candidates)]

    # independent searches advanced in lockstep so each sweep costs one
    # batched acquisition evaluation
    k = len(order)
    xs = cand[order].copy()
    fs = vals[order].astype(float).copy()
    steps = np.full(k, initial_step)
    offsets = np.zeros((2 * dim, dim))
    for i in range(dim):
        offsets[2 * i, i] = 1.0
        offsets[2 * i + 1, i] = -1.0
    for _ in range(iters):
        polls = wrap_angles(
            (xs[:, None, :] + steps[:, None, None] * offsets[None, :, :])
            .reshape(k * 2 * dim, dim))
        pv = acq.values(polls).reshape(k, 2 * dim)
        j = np.argmin(pv, axis=1)
        improved = pv[np.arange(k), j] < fs
        moved = polls.reshape(k, 2 * dim, dim)[np.arange(k), j]
        xs[improved] = moved[improved]
        fs[improved] = pv[np.arange(k), j][improved]
        steps[~improved] *= SHRINK
    # earliest candidate wins ties
    best = int(np.argmin(fs, axis=0))
    return wrap_angles(xs[best])
