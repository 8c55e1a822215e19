"""
Carleson measures and test functions
====================================

For omega = (1-|z|^2)^alpha and d eta = (1-|z|^2)^beta dv the Carleson
ratio behaves like (1-|w|^2)^(beta - alpha - (n+1)(p~/p - 1)).  Both the
ratio test on Bergman balls and the embedding test on normalized test
functions see the same threshold.
"""

import numpy as np

from bergman_lab import lab
from bergman_lab import measures as ms
from bergman_lab import model as md
from bergman_lab import quadrature as qd
from bergman_lab import weights as wt

alpha, n, p = 0.5, 2, 2.0
spec = wt.ReferenceRadial(alpha)
levels = (0.5, 0.98, 0.9992, 0.999968)
threshold = lab.carleson_threshold(alpha, n, p, p)
print("threshold for beta:", threshold)

# %%
# One measure above the threshold and one below.
for beta in (threshold + 0.5, threshold - 0.5):
    eta = ms.RadialDensity(beta, n)
    c = lab.carleson_ratio_sweep(eta, spec, p, p, 0.5, lab.GridSpec(levels))
    e = lab.embedding_ratio_sweep(eta, spec, p, p, lab.test_function_family(levels, 4.0, p, n))
    print(f"beta={beta}: carleson {c.verdict} (slope {c.meta['slope']:+.3f}), "
          f"embedding {e.verdict} (slope {e.meta['slope']:+.3f}), "
          f"power counting {lab.carleson_exponent(alpha, beta, n, p, p):+.3f}")

# %%
# Normalized test functions: norms stay bounded while the functions vanish
# on compact sets as w approaches the sphere.
w_levels = 1 - np.logspace(-0.5, -4.5, 30)
norms, peaks = lab.test_function_sweep(spec, 4.0, p, w_levels, n)
print(f"sup of norms {norms.sup:.6f}; max |f| on |z| <= 0.5 at the last levels:",
      np.array2string(peaks.ratios[-5:], precision=3))
print("hypotheses:", md.test_function_problems(4.0, spec, n) or "satisfied")

# %%
# The Forelli-Rudin integral behind the norm bound blows up with power
# q - (n-1) - t.
fr = lab.forelli_rudin_slope(0.0, 2.0, n, (0.5, 0.6, 0.7, 0.8, 0.9), qd.ProductRule(2, 64, 16))
print(f"Forelli-Rudin slope {fr.meta['slope']:.4f}, predicted {fr.meta['predicted_slope']}")
