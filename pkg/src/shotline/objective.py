"""Shot-noisy objectives: synthetic cosine sums and simulated circuits.

Both kinds expose the same surface: an exact value J(theta) that is
2*pi-periodic in every coordinate, a noisy ``evaluate`` whose variance
scales inversely with the shot count,

    y(theta, s) = J(theta) + eps,   eps ~ N(0, noise_scale / s),

and a ground-truth minimum used for regret curves.  ``noise_scale`` is
the single-shot variance; it is a fixed property of the objective, not
of the query point.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .kernels import TWO_PI
from .statevector import (
    MAX_QUBITS,
    ansatz_state,
    hamiltonian_expectation,
    hamiltonian_matrix,
)

SYNTHETIC = "synthetic"
CIRCUIT = "circuit"

_PAULI_CHARS = set("IXYZ")


@dataclass(frozen=True)
class ShotSample:
    """One noisy objective query.

    ``true_value`` is retained for post-hoc analysis only; the
    optimization engine exposes nothing but ``value`` to the optimizer.
    """

    theta: np.ndarray
    shots: int
    value: float
    true_value: float


@dataclass(frozen=True)
class SyntheticObjective:
    """J(theta) = offset + sum_i amplitudes[i] * cos(theta[i] - phases[i])."""

    amplitudes: np.ndarray
    phases: np.ndarray
    offset: float = 0.0
    noise_scale: float = 1.0

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=float))
        p = np.atleast_1d(np.asarray(self.phases, dtype=float))
        if a.shape != p.shape:
            raise ValueError("amplitudes and phases must have equal length")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")
        object.__setattr__(self, "amplitudes", a)
        object.__setattr__(self, "phases", p)

    @property
    def kind(self) -> str:
        return SYNTHETIC

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def true_value(self, theta) -> float:
        theta = _check_theta(theta, self.dim)
        return float(self.offset
                     + np.sum(self.amplitudes * np.cos(theta - self.phases)))

    def ground_truth_minimum(self):
        """Closed form: every cosine term at its trough."""
        return float(self.offset - np.sum(np.abs(self.amplitudes))), "exact"

    def as_dict(self) -> dict:
        return {
            "kind": SYNTHETIC,
            "dimension": self.dim,
            "amplitudes": [float(v) for v in self.amplitudes],
            "phases": [float(v) for v in self.phases],
            "offset": float(self.offset),
            "noise_scale": float(self.noise_scale),
        }


@dataclass(frozen=True)
class CircuitObjective:
    """Expectation of a Pauli-sum Hamiltonian under the layered RY ansatz.

    ``terms`` is a tuple of (coefficient, pauli string) pairs; pauli
    strings are uppercase over {I, X, Y, Z}, character i acting on
    qubit i.  The parameter count is qubits * layers.
    """

    qubits: int
    layers: int
    terms: tuple
    noise_scale: float = 1.0

    def __post_init__(self):
        if not 1 <= self.qubits <= MAX_QUBITS:
            raise ValueError(f"qubits must be in [1, {MAX_QUBITS}]")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")
        terms = tuple((float(c), str(p)) for c, p in self.terms)
        for c, p in terms:
            if len(p) != self.qubits or not set(p) <= _PAULI_CHARS:
                raise ValueError(f"bad Pauli string {p!r} for {self.qubits} qubits")
        object.__setattr__(self, "terms", terms)

    @property
    def kind(self) -> str:
        return CIRCUIT

    @property
    def dim(self) -> int:
        return self.qubits * self.layers

    def true_value(self, theta) -> float:
        theta = _check_theta(theta, self.dim)
        state = ansatz_state(theta, self.qubits, self.layers)
        return hamiltonian_expectation(state, self.terms)

    def eigen_bounds(self):
        """Exact extreme eigenvalues of the Hamiltonian (dense solve)."""
        H = hamiltonian_matrix(self.terms, self.qubits)
        ev = np.linalg.eigvalsh(H)
        return float(ev[0]), float(ev[-1])

    def ground_truth_minimum(self, grid_points: int = 64):
        """Best reachable value under the ansatz.

        Dense grid over [0, 2*pi)^d with local pattern-search refinement
        for d <= 3 (mode ``"grid"``); for larger d the grid is refused
        and the Hamiltonian's exact ground-state energy is reported
        instead (mode ``"eigen"``, a lower bound on the reachable
        minimum).
        """
        if self.dim > 3:
            return self.eigen_bounds()[0], "eigen"
        axes = [np.linspace(0.0, TWO_PI, grid_points, endpoint=False)] * self.dim
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        vals = np.array([self.true_value(p) for p in pts])
        best = pts[int(np.argmin(vals))].copy()
        best_v = float(np.min(vals))
        step = TWO_PI / grid_points
        for _ in range(60):
            improved = False
            for i in range(self.dim):
                for delta in (step, -step):
                    cand = best.copy()
                    cand[i] = (cand[i] + delta) % TWO_PI
                    v = self.true_value(cand)
                    if v < best_v:
                        best, best_v = cand, v
                        improved = True
            if not improved:
                step *= 0.5
                if step < 1e-7:
                    break
        return best_v, "grid"

    def as_dict(self) -> dict:
        return {
            "kind": CIRCUIT,
            "qubits": self.qubits,
            "layers": self.layers,
            "terms": [{"coeff": c, "pauli": p} for c, p in self.terms],
            "noise_scale": float(self.noise_scale),
        }


def _check_theta(theta, dim: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.shape[0] != dim:
        raise ValueError(f"theta has dimension {theta.shape[0]}, expected {dim}")
    return theta


def evaluate(obj, theta, shots: int, rng) -> ShotSample:
    """One noisy measurement of the objective at ``theta``.

    The noise is Gaussian with variance noise_scale / shots, drawn from
    ``rng``; identical (rng state, theta, shots) give bit-identical
    samples.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    theta = _check_theta(theta, obj.dim)
    j = obj.true_value(theta)
    sigma = np.sqrt(obj.noise_scale / shots)
    y = j + (rng.standard_normal() * sigma if sigma > 0 else 0.0)
    return ShotSample(theta=theta, shots=int(shots), value=float(y),
                      true_value=j)


def sample_values(obj, theta, shots: int, n: int, rng) -> np.ndarray:
    """Vectorized draw of ``n`` independent noisy values at one point."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(rng)
    theta = _check_theta(theta, obj.dim)
    j = obj.true_value(theta)
    sigma = np.sqrt(obj.noise_scale / shots)
    if sigma == 0:
        return np.full(n, j)
    return j + sigma * rng.standard_normal(n)


# ---------------------------------------------------------------------------
# Config-file loading
# ---------------------------------------------------------------------------

def objective_from_dict(cfg: dict):
    """Build an objective from its JSON dictionary form.

    Synthetic: {dimension, amplitudes, phases, offset, noise_scale}.
    Circuit:   {qubits, layers, terms: [{coeff, pauli}], noise_scale}.
    Unknown fields are rejected.
    """
    if not isinstance(cfg, dict):
        raise ValueError("objective config must be a JSON object")
    cfg = dict(cfg)
    kind = cfg.pop("kind", None)
    if kind is None:
        kind = CIRCUIT if "qubits" in cfg else SYNTHETIC
    if kind == SYNTHETIC:
        allowed = {"dimension", "amplitudes", "phases", "offset", "noise_scale"}
        _reject_unknown(cfg, allowed, "synthetic objective")
        dim = cfg.get("dimension")
        amplitudes = cfg.get("amplitudes")
        if amplitudes is None:
            raise ValueError("synthetic objective needs 'amplitudes'")
        phases = cfg.get("phases", [0.0] * len(amplitudes))
        obj = SyntheticObjective(
            amplitudes=amplitudes, phases=phases,
            offset=float(cfg.get("offset", 0.0)),
            noise_scale=float(cfg.get("noise_scale", 1.0)))
        if dim is not None and int(dim) != obj.dim:
            raise ValueError(
                f"'dimension' ({dim}) disagrees with amplitudes ({obj.dim})")
        return obj
    if kind == CIRCUIT:
        allowed = {"qubits", "layers", "terms", "noise_scale"}
        _reject_unknown(cfg, allowed, "circuit objective")
        try:
            terms = [(t["coeff"], t["pauli"]) for t in cfg["terms"]]
        except (KeyError, TypeError) as exc:
            raise ValueError(
                "circuit terms must be objects with 'coeff' and 'pauli'"
            ) from exc
        return CircuitObjective(
            qubits=int(cfg["qubits"]), layers=int(cfg["layers"]),
            terms=terms, noise_scale=float(cfg.get("noise_scale", 1.0)))
    raise ValueError(f"unknown objective kind {kind!r}")


def load_objective(path):
    """Load an objective config file (JSON)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(
                f"{path}: invalid JSON at line {exc.lineno}, column "
                f"{exc.colno}: {exc.msg}") from exc
    return objective_from_dict(cfg)


def _reject_unknown(cfg: dict, allowed: set, what: str) -> None:
    unknown = set(cfg) - allowed
    if unknown:
        raise ValueError(f"unknown fields in {what} config: "
                         + ", ".join(sorted(unknown)))
