"""
Green potentials and potential-harmonic weights
================================================

The Green function of the ball, Green potentials of atomic measures,
invariant Poisson integrals and the weights assembled from them.
"""

import numpy as np
from scipy import integrate

from bergman_lab import geometry as geo
from bergman_lab import measures as ms
from bergman_lab import weights as wt

# %%
# g in two complex dimensions against adaptive quadrature of its defining
# radial integral.
for rho in (0.1, 0.5, 0.9, 0.999):
    ref, _ = integrate.quad(lambda r: 0.75 * r**-3 * (1 - r * r), rho, 1)
    print(f"|z|={rho}: g={float(wt.green_g([rho, 0.0])):.12g} quad={ref:.12g}")

# %%
# One complex dimension recovers -log|z|.
print(float(wt.green_g([np.exp(-1)])))

# %%
# The ratio G / [(1-gamma^2)^n gamma^(-2(n-1))] stays in a fixed bracket.
rng = np.random.default_rng(1)
z, w = geo.sample_ball(2, 10_000, rng), geo.sample_ball(2, 10_000, rng)
ratio = wt.green_ratio(z, w)
print("Green ratio bracket:", ratio.min(), ratio.max())

# %%
# A weight with three atoms and a uniform boundary part.
mu = ms.AtomicBall([[0.8, 0], [0, 0.8j], [-0.5, -0.6]], [1.0, 1.0, 1.0])
spec = wt.PotentialHarmonic(mu, q=0.0, s=1.0, nu=ms.UniformBoundary(1.0, 2))
grid = geo.sample_ball(2, 5, rng, radius=0.9)
print("omega on a few points:", wt.weight_eval(spec, grid))

# %%
# Local comparability: bounded spread on D(a, r) for the potential-harmonic
# weight, none for the oscillatory weight near the origin.
for a in (0.3, 0.9, 0.99):
    hi, lo = wt.comparability_ratio(spec, [a, 0.0], 0.5, 2000, 2)
    print(f"potential-harmonic, |a|={a}: max/min {hi / lo:.3f}")
for a in (0.05, 0.5, 0.99):
    hi, lo = wt.comparability_ratio(wt.Oscillatory(0.0), [a, 0.0], 0.5, 2000, 2)
    print(f"oscillatory, |a|={a}: max/min {hi / lo:.4g}")

# %%
# Weights serialize to tagged JSON.
print(wt.weight_to_json(spec))
