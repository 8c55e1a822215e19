"""
Numerical laboratory for potential-harmonic weighted Bergman spaces on the
unit ball of C^n (n <= 3).

Modules
-------
geometry    involutions, metrics, Bergman balls, ellipsoids, inclusion constants
measures    atomic, uniform and radial-density measures on the ball and sphere
quadrature  product and Monte Carlo rules on the ball, sphere averages
weights     Green functions, potentials, Poisson integrals, weight specs
model       truncated reproducing kernels from monomial Gram matrices
lab         ratio sweeps for norm, kernel and Carleson estimates
config, report, cache, cli
            experiment files, CSV/JSON reports, model cache, ``blab`` CLI
"""

from .errors import (CacheMismatchError, GramConditioningError, InvariantViolation,
                     NonInteriorError, PoleError, ValidationError)
from .geometry import (bergman_ball_volume, bergman_metric, ellipsoid_params, hermitian_inner,
                       in_bergman_ball, inclusion_constants, involution, pseudo_hyperbolic)
from .measures import (ZERO, AtomicBall, AtomicBoundary, RadialDensity, UniformBoundary,
                       ball_mass, total_mass)
from .quadrature import MonteCarloRule, ProductRule, integrate_ball
from .weights import (Oscillatory, PotentialHarmonic, ReferenceRadial, green_G, green_g,
                      poisson_integral, potential_U, unit_weight, weight_eval)
from .model import (BergmanModel, TestFunctionParams, build_model, estimate_a_r, kernel_eval,
                    kernel_norm_sq, p_norm)

__version__ = "0.1.0"
