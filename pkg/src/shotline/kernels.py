"""Covariance kernels over circuit rotation angles.

Two stationary families, both with anisotropic (per-dimension) lengthscales:

* ``matern`` -- half-integer smoothness nu in {1/2, 3/2, 5/2}, closed forms

      nu = 1/2:  k(r) = s2 * exp(-r)
      nu = 3/2:  k(r) = s2 * (1 + sqrt(3) r) * exp(-sqrt(3) r)
      nu = 5/2:  k(r) = s2 * (1 + sqrt(5) r + 5 r^2 / 3) * exp(-sqrt(5) r)

  with r = sqrt(sum_i ((a_i - b_i) / l_i)^2) the scaled Euclidean distance.
  The distance is deliberately taken on the raw coordinates: the Matern
  family is blind to the 2*pi wrap-around of the angle domain.

* ``periodic`` -- exactly invariant under per-coordinate shifts by the
  period p (default, and normally pinned, p = 2*pi):

      k(a, b) = s2 * exp(-2 * sum_i sin^2(pi (a_i - b_i) / p) / l_i)

``s2`` is the kernel output scale (signal variance); observation noise is
handled separately by the GP model, never inside the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

MATERN = "matern"
PERIODIC = "periodic"

TWO_PI = 2.0 * np.pi

_MATERN_NU = (0.5, 1.5, 2.5)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus hyperparameters.

    Parameters
    ----------
    family : str
        ``"matern"`` or ``"periodic"``.
    lengthscales : array-like
        One positive lengthscale per input dimension.
    output_scale : float
        Signal variance s2 > 0; ``kernel(theta, theta) == output_scale``.
    nu : float
        Matern smoothness, one of 1/2, 3/2, 5/2.  Ignored for periodic.
    period : float
        Periodic kernel period, > 0.  Ignored for Matern.
    fixed_period : bool
        When True (default) the period is pinned at its value and is
        never exposed as a free hyperparameter during fitting.
    """

    family: str
    lengthscales: np.ndarray
    output_scale: float = 1.0
    nu: float = 2.5
    period: float = TWO_PI
    fixed_period: bool = True

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float))
        object.__setattr__(self, "lengthscales", ls)
        if self.family not in (MATERN, PERIODIC):
            raise ValueError(f"unknown kernel family {self.family!r}")
        if np.any(ls <= 0) or not np.all(np.isfinite(ls)):
            raise ValueError("lengthscales must be positive and finite")
        if self.output_scale <= 0:
            raise ValueError("output_scale must be positive")
        if self.family == MATERN and self.nu not in _MATERN_NU:
            raise ValueError("nu must be one of 1/2, 3/2, 5/2")
        if self.family == PERIODIC:
            if self.period <= 0:
                raise ValueError("period must be positive")
            if self.fixed_period and self.period != TWO_PI:
                raise ValueError("fixed_period pins the period at 2*pi; "
                                 "clear the flag to use another period")

    @property
    def dim(self) -> int:
        return self.lengthscales.shape[0]

    def with_params(self, **kwargs) -> "KernelSpec":
        """Copy with replaced fields (validation re-runs)."""
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        d = {
            "family": self.family,
            "lengthscales": [float(v) for v in self.lengthscales],
            "output_scale": float(self.output_scale),
        }
        if self.family == MATERN:
            d["nu"] = float(self.nu)
        else:
            d["period"] = float(self.period)
            d["fixed_period"] = bool(self.fixed_period)
        return d


def wrap_angles(theta):
    """Map angles to their canonical representatives in [0, 2*pi)."""
    return np.mod(np.asarray(theta, dtype=float), TWO_PI)


def _check_dims(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise ValueError(
            f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}"
        )
    if a.shape[-1] != spec.dim:
        raise ValueError(
            f"input dimension {a.shape[-1]} does not match kernel "
            f"dimension {spec.dim}"
        )


def _matern_of_r(r: np.ndarray, nu: float, s2: float) -> np.ndarray:
    if nu == 0.5:
        return s2 * np.exp(-r)
    if nu == 1.5:
        z = np.sqrt(3.0) * r
        return s2 * (1.0 + z) * np.exp(-z)
    z = np.sqrt(5.0) * r
    return s2 * (1.0 + z + z * z / 3.0) * np.exp(-z)


def kernel_matrix(spec: KernelSpec, A, B) -> np.ndarray:
    """Cross-covariance matrix k(A, B) of shape (n, m).

    ``A`` is (n, d) and ``B`` is (m, d); rows are angle vectors.  Uses
    matrix-product forms of the closed formulas (the anisotropic squared
    distance expanded through its cross term; the periodic exponent
    through sin^2 x = (1 - cos 2x) / 2), which agree with the direct
    per-pair evaluation to machine precision.
    """
    same = A is B
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = A if same else np.atleast_2d(np.asarray(B, dtype=float))
    _check_dims(spec, A, B)
    if same:
        # self-covariance: exact pairwise differences, so the diagonal
        # is exactly the output scale and the matrix exactly symmetric
        diff = A[:, None, :] - A[None, :, :]
        if spec.family == MATERN:
            scaled = diff / spec.lengthscales
            r = np.sqrt(np.sum(scaled * scaled, axis=-1))
            return _matern_of_r(r, spec.nu, spec.output_scale)
        s = np.sin(np.pi * diff / spec.period)
        expo = np.sum(s * s / spec.lengthscales, axis=-1)
        return spec.output_scale * np.exp(-2.0 * expo)
    if spec.family == MATERN:
        As = A / spec.lengthscales
        Bs = B / spec.lengthscales
        sq = (np.sum(As * As, axis=1)[:, None]
              + np.sum(Bs * Bs, axis=1)[None, :] - 2.0 * (As @ Bs.T))
        np.maximum(sq, 0.0, out=sq)
        return _matern_of_r(np.sqrt(sq), spec.nu, spec.output_scale)
    w = 0.5 / spec.lengthscales
    ang_a = A * (TWO_PI / spec.period)
    ang_b = B * (TWO_PI / spec.period)
    expo = (np.sum(w) - (np.cos(ang_a) * w) @ np.cos(ang_b).T
            - (np.sin(ang_a) * w) @ np.sin(ang_b).T)
    return spec.output_scale * np.exp(-2.0 * expo)


def kernel_eval(spec: KernelSpec, a, b) -> float:
    """Scalar covariance k(a, b) between two angle vectors.

    Direct per-pair closed form: k(a, a) is exactly the output scale.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("kernel_eval expects single vectors")
    _check_dims(spec, a[None, :], b[None, :])
    diff = a - b
    if spec.family == MATERN:
        scaled = diff / spec.lengthscales
        r = np.sqrt(np.sum(scaled * scaled))
        return float(_matern_of_r(np.asarray(r), spec.nu, spec.output_scale))
    s = np.sin(np.pi * diff / spec.period)
    expo = np.sum(s * s / spec.lengthscales)
    return float(spec.output_scale * np.exp(-2.0 * expo))


def kernel_diag(spec: KernelSpec, A) -> np.ndarray:
    """Diagonal k(theta, theta) for each row of A; constant output_scale."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    _check_dims(spec, A, A)
    return np.full(A.shape[0], spec.output_scale)


class PairwiseWorkspace:
    """Precomputed pairwise differences for repeated kernel evaluation.

    Hyperparameter search evaluates the same (n, n) kernel matrix under
    many lengthscale settings; the raw difference tensor only needs to
    be built once.
    """

    def __init__(self, spec_family: str, X, period: float = TWO_PI):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self.family = spec_family
        self.n = X.shape[0]
        diff = X[:, None, :] - X[None, :, :]
        if spec_family == MATERN:
            sq = diff * diff
        else:
            s = np.sin(np.pi * diff / period)
            sq = s * s
        # flat (n*n, d) layout: one GEMV per hyperparameter setting
        self.sq = np.ascontiguousarray(sq.reshape(self.n * self.n, -1))

    def matrix(self, lengthscales: np.ndarray, output_scale: float,
               nu: float = 2.5) -> np.ndarray:
        if self.family == MATERN:
            r = np.sqrt(self.sq @ (1.0 / np.asarray(lengthscales) ** 2))
            return _matern_of_r(r, nu, output_scale).reshape(self.n, self.n)
        expo = self.sq @ (1.0 / np.asarray(lengthscales))
        return (output_scale * np.exp(-2.0 * expo)).reshape(self.n, self.n)


def default_kernel_spec(family: str, dim: int, nu: float = 2.5) -> KernelSpec:
    """Unit-scale spec used as the before-any-data prior."""
    return KernelSpec(family=family, lengthscales=np.ones(dim), nu=nu)
