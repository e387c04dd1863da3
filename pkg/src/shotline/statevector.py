"""Minimal dense statevector simulator for the layered RY ansatz.

The state of q qubits is a complex array of shape (2,) * q; qubit 0 is
axis 0.  Gates are applied by tensor contraction on the state, never by
materializing the full 2^q x 2^q unitary.  Intended for q <= 12
(<= 4096 amplitudes).

Ansatz: ``layers`` repetitions of a per-qubit RY rotation bank followed
by a linear CNOT chain (control i, target i+1).  Parameters are ordered
layer-major: theta[layer * q + qubit].
"""

from __future__ import annotations

import numpy as np

MAX_QUBITS = 12

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _apply_1q(state: np.ndarray, gate: np.ndarray, qubit: int) -> np.ndarray:
    out = np.tensordot(gate, state, axes=([1], [qubit]))
    return np.moveaxis(out, 0, qubit)


def _apply_cnot(state: np.ndarray, control: int, target: int) -> np.ndarray:
    out = state.copy()
    idx_c1 = [slice(None)] * state.ndim
    idx_c1[control] = 1
    block = out[tuple(idx_c1)]
    out[tuple(idx_c1)] = np.flip(block, axis=target if target < control
                                 else target - 1)
    return out


def ry_gate(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def ansatz_state(thetas, qubits: int, layers: int) -> np.ndarray:
    """Statevector produced by the layered RY + CNOT-chain ansatz.

    ``thetas`` has length qubits * layers (layer-major).  Starts from
    |0...0>.
    """
    thetas = np.asarray(thetas, dtype=float).ravel()
    if qubits < 1 or qubits > MAX_QUBITS:
        raise ValueError(f"qubit count must be in [1, {MAX_QUBITS}]")
    if thetas.shape[0] != qubits * layers:
        raise ValueError(
            f"expected {qubits * layers} parameters, got {thetas.shape[0]}")
    state = np.zeros((2,) * qubits, dtype=complex)
    state[(0,) * qubits] = 1.0
    for layer in range(layers):
        for q in range(qubits):
            state = _apply_1q(state, ry_gate(thetas[layer * qubits + q]), q)
        for q in range(qubits - 1):
            state = _apply_cnot(state, q, q + 1)
    return state


def apply_pauli_string(state: np.ndarray, pauli: str) -> np.ndarray:
    """Apply a tensor-product Pauli operator; character i acts on qubit i."""
    out = state
    for q, ch in enumerate(pauli):
        if ch == "I":
            continue
        out = _apply_1q(out, _PAULI[ch], q)
    return out


def pauli_expectation(state: np.ndarray, pauli: str) -> float:
    """<state| P |state> for a Pauli string (real by hermiticity)."""
    return float(np.real(np.vdot(state, apply_pauli_string(state, pauli))))


def hamiltonian_expectation(state: np.ndarray, terms) -> float:
    """Expectation of sum_t coeff_t * P_t."""
    return sum(c * pauli_expectation(state, p) for c, p in terms)


def hamiltonian_matrix(terms, qubits: int) -> np.ndarray:
    """Dense 2^q x 2^q Hamiltonian, for eigen-bounds and test oracles."""
    dim = 2 ** qubits
    H = np.zeros((dim, dim), dtype=complex)
    for coeff, pauli in terms:
        op = np.array([[1.0]], dtype=complex)
        for ch in pauli:
            op = np.kron(op, _PAULI[ch])
        H += coeff * op
    return H
