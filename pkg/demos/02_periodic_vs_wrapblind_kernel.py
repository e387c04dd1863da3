"""Why the angle-periodic kernel matters near the domain seam.

One observation sits at theta = 0.2.  A query just below 2*pi is a
stone's throw away once you remember angles wrap -- but a wrap-blind
Matern kernel sees a distance of almost 2*pi and stays at prior
uncertainty, so an optimizer would waste queries exploring there.
"""

import numpy as np

from shotline import GpModel, KernelSpec

X = np.array([[0.2]])
y = np.array([0.0])
query = np.array([[2 * np.pi - 0.1]])

shared = dict(lengthscales=[1.0], output_scale=1.0)
periodic = GpModel(KernelSpec("periodic", **shared), X, y,
                   noise_variance=0.01)
matern = GpModel(KernelSpec("matern", **shared, nu=2.5), X, y,
                 noise_variance=0.01)

print(f"observation at theta = 0.2; query at theta = 2*pi - 0.1 "
      f"(wrapped gap {0.2 + 0.1:.1f} rad)\n")
for name, model in (("periodic", periodic), ("matern  ", matern)):
    mu, var = model.posterior(query)
    print(f"  {name} kernel: posterior variance {var[0]:.4f} "
          f"(prior was {model.kernel.output_scale:.1f})")

v_per = periodic.posterior(query)[1][0]
v_mat = matern.posterior(query)[1][0]
print(f"\nvariance gap: {v_mat - v_per:.3f} -- the periodic model already "
      "knows this region,\nthe wrap-blind one would re-explore it.")
