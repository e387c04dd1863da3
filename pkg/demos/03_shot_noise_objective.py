"""The shot-noise model: variance of a measurement scales as 1/shots.

Measuring a circuit s times and averaging gives a value whose variance
is the single-shot variance divided by s, so shots are the currency:
cheap queries are noisy, precise queries are expensive.
"""

import numpy as np

from shotline import SyntheticObjective, evaluate, sample_values

obj = SyntheticObjective(amplitudes=[1.0], phases=[0.4], noise_scale=4.0)
theta = [2.0]
truth = obj.true_value(theta)
print(f"true value J(theta) = {truth:+.4f}; single-shot variance "
      f"{obj.noise_scale}\n")

print("  shots   empirical var   predicted var   example draw")
for shots in (1, 10, 100, 1000, 10000):
    draws = sample_values(obj, theta, shots, 20_000, rng=shots)
    one = evaluate(obj, theta, shots, rng=1)
    print(f"  {shots:6d}   {np.var(draws):12.5f}   "
          f"{obj.noise_scale / shots:12.5f}   {one.value:+.4f}")

print("\nthe noisy values are unbiased: mean of 20k draws at s=1 is "
      f"{np.mean(sample_values(obj, theta, 1, 20_000, rng=99)):+.4f}")
