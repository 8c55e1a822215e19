"""
Geometry of the unit ball
=========================

Involutions, the pseudo-hyperbolic and Bergman metrics, and the Euclidean
shape of Bergman metric balls.
"""

import math

import numpy as np

from bergman_lab import geometry as geo

rng = np.random.default_rng(0)

# %%
# The involution swaps 0 and w and undoes itself.
w = np.array([0.5, 0.2j])
z = np.array([-0.1, 0.4])
print("phi_w(w) =", geo.involution(w, w))
print("phi_w(phi_w(z)) - z =", geo.involution(w, geo.involution(w, z)) - z)

# %%
# gamma = |phi_z(w)| and beta = arctanh(gamma).
print("gamma =", geo.pseudo_hyperbolic(z, w), " tanh(beta) =", math.tanh(geo.bergman_metric(z, w)))

# %%
# Near the sphere ``1 - gamma^2`` is taken from the closed form, which avoids
# the cancellation of ``1 - |phi_z(w)|^2``.
a, b = np.array([1 - 1e-9, 0.0]), np.array([0.0, 1 - 1e-9])
print("1 - gamma^2 near the sphere:", geo.pseudo_defect(a, b))

# %%
# Volume of D(z, r) from the closed form against membership sampling.
pts = geo.sample_ball(2, 400_000, rng)
for rho, r in [(0.0, 0.5), (0.6, 0.5), (0.9, 1.0)]:
    c = np.array([rho, 0.0])
    hits = geo.in_bergman_ball(c, r, pts)
    print(f"|z|={rho}, r={r}: formula {geo.bergman_ball_volume(c, r):.5f}, "
          f"sampled {hits.mean():.5f} +- {hits.std() / math.sqrt(len(hits)):.5f}")

# %%
# D(z, r) is an ellipsoid: radius ``rho * t`` along z and ``sqrt(rho^2 t)``
# across, with rho = tanh r.
e = geo.ellipsoid_params(np.array([0.5, 0.0]), 0.5)
print(e)

# %%
# Comparability of the defining factors inside D(a, r).
center = np.array([0.95, 0.1j])
inside = geo.sample_bergman_ball(center, 1.0, 2000, rng, boundary_fraction=0.5)
r1, r2 = geo.lemma_ratios(center, inside)
print("ratio ranges:", (r1.min(), r1.max()), (r2.min(), r2.max()),
      "bound", geo.comparability_constant(1.0))
