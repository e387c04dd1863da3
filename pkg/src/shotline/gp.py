"""Exact Gaussian-process regression with a constant prior mean.

A :class:`GpModel` is immutable once built: the Cholesky factor of
(K + noise * I + jitter * I) and the corresponding weight vector are
computed at construction and reused for every posterior query, so a
shared model can be read concurrently.

Posterior at a query point theta:

    mean(theta) = mu0 + k(theta)^T (K + noise I)^{-1} (y - mu0)
    var(theta)  = k(theta, theta) - k(theta)^T (K + noise I)^{-1} k(theta)

Variances are clamped at zero; tiny negative values are round-off, the
quantity is analytically nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky as _scipy_cholesky, solve_triangular
from scipy.optimize import minimize

from .kernels import (
    MATERN,
    PERIODIC,
    KernelSpec,
    PairwiseWorkspace,
    kernel_diag,
    kernel_matrix,
)

# Jitter escalation: relative to the mean kernel diagonal, starting tiny
# and growing tenfold on each failed factorization.
JITTER_START = 1e-8
JITTER_MAX = 1e-2

LOG_2PI = math.log(2.0 * math.pi)


class FactorizationError(RuntimeError):
    """Kernel matrix stayed non-positive-definite after jitter escalation."""


def _chol_with_jitter(A: np.ndarray, scale: float):
    """Lower Cholesky factor of A + jitter*I, escalating jitter as needed.

    Returns (L, jitter_used).  ``scale`` sets the jitter unit (mean
    kernel diagonal).
    """
    n = A.shape[0]
    work = A.copy()
    diag = work.ravel()[:: n + 1]
    factor = JITTER_START
    added = 0.0
    while True:
        jitter = factor * scale
        diag += jitter - added
        added = jitter
        try:
            L = _scipy_cholesky(work, lower=True, check_finite=False)
            return L, jitter
        except np.linalg.LinAlgError:
            factor *= 10.0
            if factor > JITTER_MAX:
                raise FactorizationError(
                    "covariance matrix is not positive definite even with "
                    f"jitter {JITTER_MAX * scale:g}; the training set is "
                    "likely ill-conditioned (e.g. duplicated inputs with "
                    "contradictory near-noiseless targets)"
                ) from None


class GpModel:
    """Fitted GP: training data, hyperparameters, cached factorization.

    Parameters
    ----------
    kernel : KernelSpec
    X : (n, d) array
        Training inputs (angles, radians).
    y : (n,) array
        Training targets.
    noise_variance : float
        Observation noise variance added to the kernel diagonal; >= 0.
    mean_const : float
        Constant prior mean mu0.
    """

    def __init__(self, kernel: KernelSpec, X=None, y=None,
                 noise_variance: float = 0.0, mean_const: float = 0.0):
        self.kernel = kernel
        if X is None:
            X = np.empty((0, kernel.dim))
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray([] if y is None else y, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise ValueError("X and y row counts differ")
        if X.shape[0] and X.shape[1] != kernel.dim:
            raise ValueError("training inputs do not match kernel dimension")
        if noise_variance < 0:
            raise ValueError("noise_variance must be nonnegative")
        self.X = X
        self.y = y
        self.noise_variance = float(noise_variance)
        self.mean_const = float(mean_const)
        self.n = X.shape[0]
        if self.n:
            K = kernel_matrix(kernel, X, X)
            scale = float(np.mean(np.diag(K)))
            K.ravel()[:: self.n + 1] += self.noise_variance
            self._L, self.jitter = _chol_with_jitter(K, scale)
            self._alpha = cho_solve((self._L, True), y - self.mean_const,
                                    check_finite=False)
        else:
            self._L = None
            self._alpha = None
            self.jitter = 0.0

    def posterior(self, queries):
        """Posterior mean and variance at each query row.

        Returns
        -------
        (means, variances) : pair of (m,) arrays
            Variances are clamped to be nonnegative.
        """
        Q = np.atleast_2d(np.asarray(queries, dtype=float))
        if Q.shape[1] != self.kernel.dim:
            raise ValueError("query dimension does not match kernel")
        prior_var = kernel_diag(self.kernel, Q)
        if self.n == 0:
            return np.full(Q.shape[0], self.mean_const), prior_var
        Kq = kernel_matrix(self.kernel, self.X, Q)  # (n, m)
        means = self.mean_const + Kq.T @ self._alpha
        V = solve_triangular(self._L, Kq, lower=True, check_finite=False)
        variances = prior_var - np.sum(V * V, axis=0)
        np.maximum(variances, 0.0, out=variances)
        return means, variances

    def mean(self, queries) -> np.ndarray:
        """Posterior mean only; skips the variance solve."""
        Q = np.atleast_2d(np.asarray(queries, dtype=float))
        if Q.shape[1] != self.kernel.dim:
            raise ValueError("query dimension does not match kernel")
        if self.n == 0:
            return np.full(Q.shape[0], self.mean_const)
        Kq = kernel_matrix(self.kernel, self.X, Q)
        return self.mean_const + Kq.T @ self._alpha

    def log_marginal_likelihood(self) -> float:
        """log p(y | X, hyperparameters) for the training set."""
        if self.n == 0:
            return 0.0
        resid = self.y - self.mean_const
        quad = resid @ self._alpha
        logdet = 2.0 * np.sum(np.log(np.diag(self._L)))
        return -0.5 * (quad + logdet + self.n * LOG_2PI)

    def hyperparameters(self) -> dict:
        """JSON-ready hyperparameter dictionary (for run logs)."""
        d = self.kernel.as_dict()
        d["noise_variance"] = self.noise_variance
        d["mean_const"] = self.mean_const
        return d


# ---------------------------------------------------------------------------
# Marginal-likelihood hyperparameter fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FitConfig:
    """Bounds and search settings for hyperparameter fitting.

    All searches run in log space over the free parameters.  The noise
    variance can be pinned (``fixed_noise_variance``), e.g. to the known
    shot-noise level; the periodic period is only free when the kernel
    spec clears its ``fixed_period`` flag.  ``mean_mode`` is ``"average"``
    (prior mean set to the target mean) or ``"zero"``.
    """

    lengthscale_bounds: tuple = (1e-2, 1e2)
    output_scale_bounds: tuple = (1e-4, 1e4)
    noise_bounds: tuple = (1e-8, 1e1)
    period_bounds: tuple = (1e-1, 1e2)
    restarts: int = 8
    fixed_noise_variance: float | None = None
    fit_period: bool = False
    mean_mode: str = "average"
    maxfev: int = 250
    max_fit_points: int | None = None


@dataclass(frozen=True)
class FitResult:
    kernel: KernelSpec
    noise_variance: float
    mean_const: float
    log_marginal: float


def _mean_for(y: np.ndarray, cfg: FitConfig) -> float:
    return float(np.mean(y)) if cfg.mean_mode == "average" else 0.0


def _lml_from_matrix(K: np.ndarray, resid: np.ndarray, noise: float) -> float:
    n = K.shape[0]
    scale = float(np.mean(K.ravel()[:: n + 1]))
    A = K.copy()
    A.ravel()[:: n + 1] += noise
    try:
        L, _ = _chol_with_jitter(A, scale)
    except FactorizationError:
        return -np.inf
    alpha = cho_solve((L, True), resid, check_finite=False)
    logdet = 2.0 * np.sum(np.log(L.ravel()[:: n + 1]))
    return -0.5 * (resid @ alpha + logdet + n * LOG_2PI)


def fit_hyperparameters(X, y, family: str, config: FitConfig | None = None,
                        rng=None, nu: float = 2.5,
                        warm_start: "FitResult | None" = None) -> FitResult:
    """Maximize the log marginal likelihood over bounded hyperparameters.

    Multistart local search: ``config.restarts`` log-uniform random
    starting points (plus the warm start, when given), each refined by a
    bounded gradient-free Powell descent in log space.  Deterministic
    given ``rng``.

    Raises
    ------
    ValueError
        For fewer than two observations.
    """
    cfg = config or FitConfig()
    rng = np.random.default_rng(rng)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    n, d = X.shape
    if n < 2:
        raise ValueError("hyperparameter fitting needs at least 2 points")

    mean_const = _mean_for(y, cfg)
    if cfg.max_fit_points is not None and n > cfg.max_fit_points:
        # Hyperparameter search on a seeded subsample; the caller still
        # conditions the final model on the full training set.
        keep = rng.choice(n, size=cfg.max_fit_points, replace=False)
        X = X[keep]
        y = y[keep]
        n = cfg.max_fit_points
    resid = y - mean_const

    # Degenerate data: nothing to explain, park the scales at their floors.
    if np.ptp(y) == 0.0:
        kern = KernelSpec(family=family, lengthscales=np.ones(d), nu=nu,
                          output_scale=cfg.output_scale_bounds[0],
                          fixed_period=not (family == PERIODIC and
                                            cfg.fit_period))
        noise = (cfg.fixed_noise_variance if cfg.fixed_noise_variance
                 is not None else cfg.noise_bounds[0])
        return FitResult(kern, noise, mean_const,
                         _lml_from_matrix(
                             PairwiseWorkspace(family, X).matrix(
                                 kern.lengthscales, kern.output_scale, nu),
                             resid, noise))

    fit_noise = cfg.fixed_noise_variance is None
    fit_period = family == PERIODIC and cfg.fit_period
    # Blocks of the packed log-parameter vector:
    #   [log ls (d)] [log s2] [log noise?] [log period?]
    lo = [math.log(cfg.lengthscale_bounds[0])] * d + \
         [math.log(cfg.output_scale_bounds[0])]
    hi = [math.log(cfg.lengthscale_bounds[1])] * d + \
         [math.log(cfg.output_scale_bounds[1])]
    if fit_noise:
        lo.append(math.log(cfg.noise_bounds[0]))
        hi.append(math.log(cfg.noise_bounds[1]))
    if fit_period:
        lo.append(math.log(cfg.period_bounds[0]))
        hi.append(math.log(cfg.period_bounds[1]))
    lo = np.array(lo)
    hi = np.array(hi)

    period0 = 2.0 * np.pi
    if not fit_period and warm_start is not None and family == PERIODIC:
        period0 = warm_start.kernel.period
    workspace = None
    if not fit_period:
        workspace = PairwiseWorkspace(family, X, period=period0)

    def unpack(z: np.ndarray):
        ls = np.exp(z[:d])
        s2 = math.exp(z[d])
        i = d + 1
        noise = math.exp(z[i]) if fit_noise else cfg.fixed_noise_variance
        if fit_noise:
            i += 1
        period = math.exp(z[i]) if fit_period else period0
        return ls, s2, noise, period

    def neg_lml(z: np.ndarray) -> float:
        z = np.clip(z, lo, hi)
        ls, s2, noise, period = unpack(z)
        if workspace is not None:
            K = workspace.matrix(ls, s2, nu)
        else:
            spec = KernelSpec(family=family, lengthscales=ls, output_scale=s2,
                              nu=nu, period=period, fixed_period=False)
            K = kernel_matrix(spec, X, X)
        return -_lml_from_matrix(K, resid, noise)

    starts = []
    if warm_start is not None:
        z0 = np.concatenate([
            np.log(warm_start.kernel.lengthscales),
            [math.log(warm_start.kernel.output_scale)],
        ])
        if fit_noise:
            z0 = np.append(z0, math.log(max(warm_start.noise_variance,
                                            cfg.noise_bounds[0])))
        if fit_period:
            z0 = np.append(z0, math.log(warm_start.kernel.period))
        starts.append(np.clip(z0, lo, hi))
    for _ in range(cfg.restarts):
        starts.append(rng.uniform(lo, hi))

    best_z, best_f = None, np.inf
    for z0 in starts:
        res = minimize(neg_lml, z0, method="Powell",
                       bounds=list(zip(lo, hi)),
                       options={"xtol": 2e-2, "ftol": 1e-3,
                                "maxfev": cfg.maxfev})
        if res.fun < best_f:
            best_f, best_z = res.fun, np.clip(res.x, lo, hi)

    ls, s2, noise, period = unpack(best_z)
    kern = KernelSpec(family=family, lengthscales=ls, output_scale=s2, nu=nu,
                      period=period, fixed_period=not fit_period)
    return FitResult(kern, float(noise), mean_const, -float(best_f))


def fit_gp(X, y, family: str, config: FitConfig | None = None, rng=None,
           nu: float = 2.5, warm_start: FitResult | None = None) -> GpModel:
    """Fit hyperparameters and return the ready-to-query model."""
    res = fit_hyperparameters(X, y, family, config=config, rng=rng, nu=nu,
                              warm_start=warm_start)
    return GpModel(res.kernel, X, y, noise_variance=res.noise_variance,
                   mean_const=res.mean_const)
