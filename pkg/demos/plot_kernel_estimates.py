"""
Local and global kernel estimates
=================================

Local equivalence of normalized kernels, pointwise off-diagonal decay,
the difference bound for polynomials and the Hessian used in the decay
argument.
"""

import numpy as np

from bergman_lab import lab
from bergman_lab import measures as ms
from bergman_lab import model as md
from bergman_lab import quadrature as qd
from bergman_lab import weights as wt

mu = ms.AtomicBall([[0.8, 0], [0, 0.8j], [-0.5, -0.6]], [1.0, 1.0, 1.0])
spec = wt.PotentialHarmonic(mu, 0.0, 1.0, ms.UniformBoundary(1.0, 2))
model = md.build_model(spec, 12, qd.ProductRule(2, 64, 4096))

# %%
# a_r bounds ||K_z|| / ||K_a|| on D(a, r).
a_r = md.estimate_a_r(model, 0.5, 2000, 0)
print(f"a_r(0.5) = {a_r:.4f}")

# %%
# |K(z,w)| / sqrt(K(z,z) K(w,w)) on small Euclidean balls.
s = lab.local_kernel_equivalence_sweep(model, 0.5, lab.GridSpec(lab.KERNEL_LEVELS, 4, 7), a_r=a_r)
print(f"local ratios in [{s.inf:.6f}, {s.sup:.6f}], lower constant {s.meta['proof_lower_bound']:.3f}")

# %%
# Off-diagonal decay with exponent t; the empirical constant grows with t.
for t in (0.25, 0.5, 0.75):
    d = lab.pointwise_decay_sweep(model, t, 400, 8)
    print(f"t={t}: sup {d.sup:.6f} (proof constant {d.meta['proof_constant']:.1f})")

# %%
# |f(z) - f(w)| against (|z-w| / (1-|z|^2)) ||K_z|| for unit-norm polynomials.
diff = lab.difference_bound_sweep(model, 0.5, 1000, 13, a_r=a_r)
print(f"difference sup {diff.sup:.4f} <= bound {diff.meta['bound']:.2f}: {diff.verdict}")

# %%
# The complex Hessian of t log(|1-<z,w>|^2 / (1-|z|^2)) and its inverse.
h = lab.hessian_inverse_check(np.array([0.5, 0.3]), np.array([0.1, -0.2]), 0.5)
print(np.round(h.m_matrix, 6))
print("identity residual", h.identity_residual, "finite differences", h.finite_difference_error)
