"""The simulated circuit objective: ansatz states and Pauli-sum energies.

Loads the bundled hydrogen-like 2-qubit Hamiltonian, evaluates exact
expectation values under the layered RY ansatz, and compares the best
reachable energy with the Hamiltonian's true ground state.
"""

from pathlib import Path

import numpy as np

from shotline import evaluate, load_objective

obj = load_objective(Path(__file__).resolve().parent.parent
                     / "configs" / "hydrogen_like.json")
print(f"{obj.qubits} qubits, {obj.layers} layers, {len(obj.terms)} "
      f"Hamiltonian terms, {obj.dim} rotation angles\n")

rng = np.random.default_rng(3)
print("  sample angles                      energy")
for _ in range(5):
    theta = rng.uniform(0, 2 * np.pi, obj.dim)
    angles = np.array2string(theta, precision=2, floatmode="fixed")
    print(f"  {angles}  {obj.true_value(theta):+.4f}")

lo, hi = obj.eigen_bounds()
print(f"\nexact eigenvalue range of H: [{lo:+.4f}, {hi:+.4f}]")

best = min(obj.true_value(rng.uniform(0, 2 * np.pi, obj.dim))
           for _ in range(5000))
print(f"best of 5000 random ansatz states: {best:+.4f} "
      f"(gap to ground state {best - lo:.4f})")

noisy = evaluate(obj, np.zeros(obj.dim), shots=100, rng=0)
print(f"\na 100-shot measurement at theta = 0: y = {noisy.value:+.4f} "
      f"(exact {noisy.true_value:+.4f})")
