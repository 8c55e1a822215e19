r"""
Integration over the ball and the sphere of :math:`\mathbb{C}^n`.

All ball integrals are against the normalized volume ``dv`` (``v(B) = 1``)
and all sphere integrals against normalized surface measure.

Two ball rules are provided:

* :class:`ProductRule` -- Gauss-Jacobi nodes in ``x = |z|^2`` (the radial
  Jacobian ``n x^{n-1}`` is the Jacobi weight, so radial polynomials of
  degree ``2*radial_order - 1`` in ``x`` are integrated exactly) times a
  sphere rule.
* :class:`MonteCarloRule` -- uniform samples with a standard error.

The default sphere rule writes ``zeta_j = sqrt(u_j) exp(i theta_j)``:
``(u_1, ..., u_n)`` is uniform on the simplex (Gauss-Jacobi in collapsed
coordinates) and the phases are equispaced.  It integrates
``zeta^a conj(zeta)^b`` exactly whenever ``|a_j - b_j| < M`` and
``|a| <= 2K - 1``, where ``K`` simplex nodes and ``M`` phases are used per
coordinate.  ``sphere_kind="random"`` gives seeded i.i.d. points with equal
weights instead.
"""

from dataclasses import dataclass
from functools import cached_property
import itertools
import math

import numpy as np
from scipy import special

from . import geometry as geo

DEFAULT_SPHERE_COUNT = {1: 64, 2: 4096, 3: 59049}


def gauss_jacobi_unit(order, a=0.0, b=0.0):
    """
    Gauss nodes/weights on [0, 1] for the weight ``(1-x)^a x^b``,
    normalized so the weights sum to 1.
    """
    t, w = special.roots_jacobi(order, a, b)
    x = 0.5 * (t + 1.0)
    return x, w / np.sum(w)


def _structured_sphere(n, count, seed):
    rng = np.random.default_rng(seed)
    if n == 1:
        m = max(int(count), 1)
        theta = 2 * np.pi * (np.arange(m) + rng.random()) / m
        return np.exp(1j * theta)[:, None], np.full(m, 1.0 / m)
    k = max(2, int(round(count ** (1.0 / (2 * n - 1)))))
    m = k
    # collapsed coordinates on the simplex: a_i carries weight (1-a_i)^{n-1-i}
    simplex_axes = [gauss_jacobi_unit(k, a=n - 2 - i, b=0.0) for i in range(n - 1)]
    u_list, uw_list = [], []
    for combo in itertools.product(*[range(k)] * (n - 1)):
        rest, u, weight = 1.0, [], 1.0
        for i, j in enumerate(combo):
            a, wa = simplex_axes[i][0][j], simplex_axes[i][1][j]
            u.append(rest * a)
            rest *= 1.0 - a
            weight *= wa
        u.append(rest)
        u_list.append(u)
        uw_list.append(weight)
    u = np.array(u_list)
    uw = np.array(uw_list)
    offsets = rng.random(n)
    phases = [2 * np.pi * (np.arange(m) + offsets[j]) / m for j in range(n)]
    grid = np.stack(np.meshgrid(*phases, indexing="ij"), axis=-1).reshape(-1, n)
    pts = np.sqrt(u)[:, None, :] * np.exp(1j * grid)[None, :, :]
    wts = uw[:, None] * np.full(grid.shape[0], 1.0 / grid.shape[0])[None, :]
    return pts.reshape(-1, n), wts.reshape(-1)


def sphere_rule(n, count=None, seed=0, kind="product"):
    """Points and weights (summing to 1) for the unit sphere of C^n."""
    n = geo.check_dimension(n)
    count = DEFAULT_SPHERE_COUNT[n] if count is None else int(count)
    if kind == "product":
        return _structured_sphere(n, count, seed)
    if kind == "random":
        pts = geo.sample_sphere(n, count, np.random.default_rng(seed))
        return pts, np.full(count, 1.0 / count)
    raise ValueError(f"unknown sphere rule kind {kind!r}")


@dataclass(frozen=True)
class ProductRule:
    """Radial Gauss-Jacobi rule times a sphere rule."""

    n: int
    radial_order: int = 64
    sphere_count: int = None
    seed: int = 0
    sphere_kind: str = "product"

    def __post_init__(self):
        geo.check_dimension(self.n)
        if self.radial_order < 1:
            raise ValueError("radial_order must be >= 1")
        if self.sphere_count is None:
            object.__setattr__(self, "sphere_count", DEFAULT_SPHERE_COUNT[self.n])

    @cached_property
    def radial(self):
        """``(x, w)``: nodes in ``x = |z|^2`` with weights for ``n x^{n-1} dx``."""
        return gauss_jacobi_unit(self.radial_order, a=0.0, b=self.n - 1.0)

    @cached_property
    def sphere(self):
        return sphere_rule(self.n, self.sphere_count, self.seed, self.sphere_kind)

    @cached_property
    def nodes(self):
        """``(points, weights)`` over the ball, radial index varying slowest."""
        x, xw = self.radial
        s, sw = self.sphere
        pts = np.sqrt(x)[:, None, None] * s[None, :, :]
        wts = xw[:, None] * sw[None, :]
        pts, wts = pts.reshape(-1, self.n), wts.reshape(-1)
        pts.setflags(write=False)
        wts.setflags(write=False)
        return pts, wts

    @property
    def size(self):
        return len(self.radial[0]) * len(self.sphere[1])

    def refined(self, factor=2):
        """The same rule with ``factor`` times the radial order and sphere count."""
        return ProductRule(self.n, self.radial_order * factor, self.sphere_count * factor,
                           self.seed, self.sphere_kind)

    def to_json(self):
        return {"kind": "product", "radial_order": self.radial_order,
                "sphere_count": self.sphere_count, "seed": self.seed,
                "sphere_kind": self.sphere_kind}


@dataclass(frozen=True)
class MonteCarloRule:
    """Uniform-in-ball Monte Carlo with ``count`` samples."""

    n: int
    count: int = 100_000
    seed: int = 0

    @cached_property
    def nodes(self):
        pts = geo.sample_ball(self.n, self.count, np.random.default_rng(self.seed))
        pts.setflags(write=False)
        return pts, np.full(self.count, 1.0 / self.count)

    def refined(self, factor=2):
        return MonteCarloRule(self.n, self.count * factor, self.seed)

    def to_json(self):
        return {"kind": "montecarlo", "count": self.count, "seed": self.seed}


def rule_from_json(obj, n):
    obj = dict(obj or {})
    kind = obj.pop("kind", "product")
    if kind == "product":
        return ProductRule(n, **obj)
    if kind == "montecarlo":
        return MonteCarloRule(n, **obj)
    raise ValueError(f"unknown rule kind {kind!r}")


def _check_finite(values, points):
    bad = ~np.isfinite(values)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise FloatingPointError(f"integrand not finite at node {i}: {points[i]!r}")


def integrate_ball(f, rule):
    """
    Integrate ``f`` (vectorized over an (m, n) array of points) over the ball.

    Returns ``(value, stderr)``; ``stderr`` is 0 for :class:`ProductRule`.
    """
    pts, wts = rule.nodes
    vals = np.asarray(f(pts))
    _check_finite(vals, pts)
    value = np.sum(wts * vals)
    if isinstance(rule, MonteCarloRule):
        return value, float(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    return value, 0.0


def integrate_sphere(f, n, count, seed):
    """Monte Carlo mean of ``f`` over uniform sphere points; ``(value, stderr)``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    pts = geo.sample_sphere(n, count, np.random.default_rng(seed))
    vals = np.asarray(f(pts))
    _check_finite(vals, pts)
    stderr = float(np.std(vals, ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return np.mean(vals), stderr


def sphere_power_average(c, n, y):
    r"""
    :math:`\int_S |1 - \langle \sqrt{y}\,\zeta, e\rangle|^{-2c}\,d\sigma(\zeta)`
    for a unit vector ``e``; equals :math:`{}_2F_1(c, c; n; y)`.

    For ``y > 1/2`` Euler's transformation
    ``(1-y)^{n-2c} 2F1(n-c, n-c; n; y)`` isolates the boundary singularity.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    lo = y <= 0.5
    out[lo] = special.hyp2f1(c, c, n, y[lo])
    hi = ~lo
    out[hi] = (1.0 - y[hi]) ** (n - 2.0 * c) * special.hyp2f1(n - c, n - c, n, y[hi])
    return out


def radial_integral(h, n, a=0.0, layer=1.0, order=24):
    r"""
    :math:`n \int_0^1 x^{n-1} (1-x)^a h(x)\,dx` by composite Gauss rules.

    Panels are graded geometrically toward ``x = 1`` until they are far
    narrower than ``layer`` (the width of any boundary layer in ``h``) and
    toward ``x = 0``; the two end panels carry the algebraic factors as
    Jacobi weights.  ``h`` must accept an array of ``x`` values.
    """
    if not a > -1:
        raise ValueError("endpoint exponent a must exceed -1")
    k_top = min(52, int(math.ceil(math.log2(1.0 / max(layer, 1e-300)))) + 12)
    k_bot = 40
    edges = sorted({0.5} | {1.0 - 2.0**-k for k in range(1, k_top + 1)}
                   | {2.0**-k for k in range(1, k_bot + 1)})
    t, tw = special.roots_legendre(order)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = lo + 0.5 * (hi - lo) * (t + 1.0)
        total += 0.5 * (hi - lo) * np.sum(tw * x ** (n - 1) * (1.0 - x) ** a * h(x))
    # [1 - eps, 1]: weight (1-x)^a
    eps = 2.0**-k_top
    tj, wj = special.roots_jacobi(order, a, 0.0)
    x = 1.0 - eps + 0.5 * eps * (tj + 1.0)
    total += (0.5 * eps) ** (a + 1) * np.sum(wj * x ** (n - 1) * h(x))
    # [0, delta]: weight x^{n-1}
    delta = 2.0**-k_bot
    tj, wj = special.roots_jacobi(order, 0.0, n - 1.0)
    x = 0.5 * delta * (tj + 1.0)
    total += (0.5 * delta) ** n * np.sum(wj * (1.0 - x) ** a * h(x))
    return n * total
