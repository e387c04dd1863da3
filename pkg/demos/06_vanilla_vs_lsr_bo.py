"""One optimization run, two strategies, same shot budget.

Vanilla BO spends the initialization fraction on a handful of full-cost
random queries.  The low-shot-residual loop spends it on a crowd of
cheap noisy queries instead, freezes that model's mean as a base map,
and then only has to learn the residual.  Watch the incumbent traces.
"""

import numpy as np

from shotline import RunOptions, SyntheticObjective, incumbent, run_lsr_bo, run_vanilla_bo

obj = SyntheticObjective(amplitudes=[1.0, 1.0], phases=[0.9, 2.2],
                         noise_scale=4.0)
j_star, _ = obj.ground_truth_minimum()
budget, s_high = 40_000, 1_000
opts = RunOptions(fit_restarts=4, refit_restarts=1, lowshot_fit_restarts=2)

van = run_vanilla_bo(obj, "periodic", gamma=0.2, budget=budget,
                     s_high=s_high, seed=5, options=opts)
lsr = run_lsr_bo(obj, "periodic", gamma=0.2, budget=budget, s_high=s_high,
                 s_low=20, seed=5, options=opts)

print(f"budget {budget} shots, {s_high} per full query; "
      f"true minimum {j_star:+.3f}\n")
print("vanilla: 8 full-cost random queries, then 32 guided queries")
print("lsr:     400 cheap 20-shot queries, then 32 guided queries\n")

print("  guided query   vanilla incumbent   lsr incumbent")
v_bo = [q.incumbent_y for q in van.queries if q.phase == "bo"]
l_bo = [q.incumbent_y for q in lsr.queries if q.phase == "bo"]
for i in range(0, len(v_bo), 4):
    print(f"  {i:12d}   {v_bo[i]:+17.4f}   {l_bo[i]:+13.4f}")

print(f"\nfinal regret: vanilla {incumbent(van)[1] - j_star:+.4f}, "
      f"lsr {incumbent(lsr)[1] - j_star:+.4f}")
