"""
Truncated reproducing kernels against closed forms
===================================================

The Gram matrix of monomials is factorized once; the orthonormalized
monomials give the truncated kernel K_N.  For omega = 1 and for
(1-|z|^2)^alpha the exact kernels are known.
"""

import numpy as np

from bergman_lab import geometry as geo
from bergman_lab import lab
from bergman_lab import measures as ms
from bergman_lab import model as md
from bergman_lab import quadrature as qd
from bergman_lab import weights as wt

rule = qd.ProductRule(2, 64, 4096)
rng = np.random.default_rng(4)
z = geo.sample_ball(2, 100, rng, radius=0.5)
w = geo.sample_ball(2, 100, rng, radius=0.5)

# %%
# omega = 1: K(z, w) = 1 / (1 - <z, w>)^3.
unit = md.build_model(wt.unit_weight(2), 12, rule)
err = np.abs(unit.kernel(z, w) * (1 - geo.hermitian_inner(z, w)) ** 3 - 1)
print(f"unit weight: max relative error {err.max():.2e}, condition {unit.condition_estimate:.3g}")

# %%
# omega = 1 - |z|^2: K(z, w) = 3 / (1 - <z, w>)^4.
radial = md.build_model(wt.ReferenceRadial(1.0), 12, rule)
q = radial.kernel(z, w) * (1 - geo.hermitian_inner(z, w)) ** 4
print(f"radial weight: constant {np.median(q.real):.8f}, spread {np.abs(q / 3 - 1).max():.2e}")

# %%
# A potential-harmonic weight has no closed form; K(z,z)(1-|z|^2)^3 omega(z)
# stays in a narrow band and the band is stable under refinement.
mu = ms.AtomicBall([[0.8, 0], [0, 0.8j], [-0.5, -0.6]], [1.0, 1.0, 1.0])
spec = wt.PotentialHarmonic(mu, 0.0, 1.0, ms.UniformBoundary(1.0, 2))
grid = lab.GridSpec(lab.KERNEL_LEVELS, 8, 6)
for N, count in ((12, 4096), (16, 8192)):
    model = md.build_model(spec, N, qd.ProductRule(2, 64, count))
    print(f"N={N}, sphere points {count}: band {lab.norm_estimate_sweep(model, grid).band:.4f}")

# %%
# The Gram guard refuses a rule too coarse to separate the monomials.
try:
    md.build_model(spec, 12, qd.ProductRule(2, 4, 16))
except md.GramConditioningError as exc:
    print("guard:", exc)
