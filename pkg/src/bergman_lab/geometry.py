r"""
Geometry of the unit ball :math:`\mathbb{B} \subset \mathbb{C}^n`.

Points are complex numpy arrays whose last axis holds the ``n`` coordinates;
every function broadcasts over leading axes.  Volumes use the normalized
Lebesgue measure, ``v(B) = 1``; multiply by ``pi**n / n!`` for raw Lebesgue
measure.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import NonInteriorError

DIMENSION_CAP = 3


def check_dimension(n, cap=DIMENSION_CAP):
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= cap):
        raise ValueError(f"dimension n={n!r} outside supported range 1..{cap}")
    return int(n)


def as_points(z):
    """Return ``z`` as a complex array with at least one axis."""
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    return z


def norm_sq(z):
    z = as_points(z)
    return np.sum(z.real**2 + z.imag**2, axis=-1)


def _require_interior(*points):
    for z in points:
        if np.any(norm_sq(z) >= 1.0):
            raise NonInteriorError("point(s) not in the open unit ball")


def hermitian_inner(z, w):
    r"""Hermitian form :math:`\langle z, w\rangle = \sum_j z_j \overline{w_j}`."""
    z, w = as_points(z), as_points(w)
    if z.shape[-1] != w.shape[-1]:
        raise ValueError(f"dimension mismatch: {z.shape[-1]} != {w.shape[-1]}")
    return np.sum(z * np.conj(w), axis=-1)


def involution(w, z):
    r"""
    Automorphism :math:`\varphi_w` of the ball evaluated at ``z``.

    :math:`\varphi_w` swaps ``0`` and ``w`` and is its own inverse.  For
    ``w = 0`` the formula degenerates; the continuous extension
    :math:`\varphi_0(z) = -z` is used.

    Parameters
    ----------
    w : array_like, shape (..., n)
        Base point of the involution.
    z : array_like, shape (..., n)
        Evaluation point(s).

    Returns
    -------
    ndarray, shape (..., n)
    """
    w, z = as_points(w), as_points(z)
    _require_interior(w, z)
    ww = norm_sq(w)[..., None]
    zw = hermitian_inner(z, w)[..., None]
    safe = np.where(ww > 0.0, ww, 1.0)
    proj = np.where(ww > 0.0, zw / safe, 0.0) * w
    s_w = np.sqrt(1.0 - ww)
    return (w - proj - s_w * (z - proj)) / (1.0 - zw)


def pseudo_defect(z, w):
    r"""
    :math:`1 - \gamma(z,w)^2` computed from the closed-form identity.

    Accurate near the sphere, where forming ``1 - |phi_z(w)|**2`` directly
    cancels catastrophically.
    """
    z, w = as_points(z), as_points(w)
    _require_interior(z, w)
    return (1.0 - norm_sq(z)) * (1.0 - norm_sq(w)) / np.abs(1.0 - hermitian_inner(w, z)) ** 2


def pseudo_hyperbolic(z, w):
    """Pseudo-hyperbolic distance ``|phi_z(w)|``, a value in [0, 1)."""
    return np.sqrt(norm_sq(involution(z, w)))


def bergman_metric(z, w):
    """Bergman distance ``arctanh(pseudo_hyperbolic(z, w))``."""
    return np.arctanh(pseudo_hyperbolic(z, w))


def in_bergman_ball(center, r, w):
    """Membership of ``w`` in the Bergman ball ``D(center, r)``."""
    if r <= 0:
        raise ValueError("radius must be positive")
    # gamma < tanh(r) is the same set and avoids arctanh overflow near gamma = 1
    return pseudo_hyperbolic(center, w) < np.tanh(r)


def bergman_ball_volume(z, r):
    """Normalized volume of the Bergman ball ``D(z, r)``."""
    z = as_points(z)
    _require_interior(z)
    n = z.shape[-1]
    R2 = np.tanh(r) ** 2
    zz = norm_sq(z)
    return R2**n * (1.0 - zz) ** (n + 1) / (1.0 - R2 * zz) ** (n + 1)


def lemma_ratios(z, w):
    """
    The two quantities bounded two-sidedly on Bergman balls:
    ``(1-|z|^2)/(1-|w|^2)`` and ``(1-|w|^2)/|1-<w,z>|``.
    """
    dz, dw = 1.0 - norm_sq(z), 1.0 - norm_sq(w)
    return dz / dw, dw / np.abs(1.0 - hermitian_inner(w, z))


def comparability_constant(r):
    """A constant valid for both :func:`lemma_ratios` on ``D(z, r)``."""
    return 4.0 * math.exp(2.0 * r)


@dataclass(frozen=True)
class EllipsoidParams:
    """Euclidean description of the pseudo-hyperbolic ball ``Delta(z, r)``."""

    center: np.ndarray
    t_param: float
    radius_tangential: float
    radius_normal: float


def ellipsoid_params(z, r):
    """
    Center and semi-axes of ``{w : gamma(z, w) < r}`` for ``0 < r < 1``.

    The slice along the complex line through ``z`` is a disc of radius
    ``r*t``; the slice along its orthogonal complement is a ball of radius
    ``r*sqrt(t)``.  At ``z = 0`` the set is the Euclidean ball of radius ``r``.
    """
    if not 0 < r < 1:
        raise ValueError("pseudo-hyperbolic radius must lie in (0, 1)")
    z = as_points(z)
    if z.ndim != 1:
        raise ValueError("ellipsoid_params takes a single point")
    _require_interior(z)
    zz = float(norm_sq(z))
    if zz == 0.0:
        return EllipsoidParams(np.zeros_like(z), 1.0, r, r)
    denom = 1.0 - r * r * zz
    t = (1.0 - zz) / denom
    return EllipsoidParams((1.0 - r * r) / denom * z, t, r * t, r * math.sqrt(t))


def ellipsoid_boundary(params, z, u):
    """
    Map unit vectors ``u`` (shape (m, n)) onto the boundary of the ellipsoid.

    ``u`` is split into its component along ``z`` and the orthogonal part;
    each is rescaled by the matching semi-axis.
    """
    z, u = as_points(z), as_points(u)
    zz = float(norm_sq(z))
    if zz == 0.0:
        return params.center + params.radius_tangential * u
    e = z / math.sqrt(zz)
    along = hermitian_inner(u, e)[..., None] * e
    return params.center + params.radius_tangential * along + params.radius_normal * (u - along)


@dataclass(frozen=True)
class InclusionConstants:
    r1: float
    big_c: float
    alpha: float
    a_r_estimate: float
    divisor: float


def inclusion_constants(r, n, a_r_estimate=1.0, divisor=4):
    r"""
    Constants for Euclidean balls inside Bergman balls.

    ``r1 = 4 e^{2r} / (e^{2r} + 1)^2`` is the lower bound of
    :math:`1-\gamma^2` on ``D(z, r)``.  ``big_c = min(8 a_r sqrt(n) r1 / d,
    r1 / d)`` and ``alpha = big_c / (8 a_r sqrt(n))``, where the divisor ``d``
    is 4 for the difference estimate and 16 for the local kernel estimate.

    The containment ``B(z, big_c (1-|z|^2)) in D(z, r)`` holds for
    ``r >~ 0.31`` (divisor 4); below that the Euclidean ball pokes out of the
    Bergman ball.  :func:`euclidean_inclusion_margin` measures this.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if a_r_estimate < 1:
        raise ValueError("a_r_estimate must be >= 1")
    r1 = 4.0 * math.exp(2 * r) / (math.exp(2 * r) + 1.0) ** 2
    scale = 8.0 * a_r_estimate * math.sqrt(n)
    big_c = min(scale * r1 / divisor, r1 / divisor)
    return InclusionConstants(r1, big_c, big_c / scale, float(a_r_estimate), float(divisor))


def sample_sphere(n, count, rng):
    """Uniform points on the unit sphere of C^n (normalized complex Gaussians)."""
    g = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_ball(n, count, rng, radius=1.0):
    """Uniform points in the ball of the given radius (radius * U^(1/2n) * direction)."""
    u = sample_sphere(n, count, rng)
    rho = radius * rng.random(count) ** (1.0 / (2 * n))
    return rho[:, None] * u


def sample_bergman_ball(center, r, count, rng, boundary_fraction=0.0):
    """
    Points of ``D(center, r)`` as images ``phi_center(u)`` with ``|u| < tanh r``.

    The first ``boundary_fraction * count`` samples sit on (just inside) the
    boundary sphere ``|u| = tanh r``, where ratio extremes are attained.
    """
    center = as_points(center)
    n = center.shape[-1]
    R = math.tanh(r)
    u = sample_ball(n, count, rng, radius=R)
    k = int(boundary_fraction * count)
    if k:
        u[:k] = sample_sphere(n, k, rng) * R * (1.0 - 1e-12)
    return involution(center, u)


def euclidean_inclusion_margin(z, r, radius, count, rng):
    """
    Largest ``gamma(z, w) / tanh(r)`` over points ``w`` on the sphere
    ``|w - z| = radius``; a value below 1 means the Euclidean ball is inside
    ``D(z, r)`` on the sample.
    """
    z = as_points(z)
    w = z + radius * sample_sphere(z.shape[-1], count, rng)
    inside = norm_sq(w) < 1.0
    if not np.all(inside):
        return math.inf
    return float(np.max(np.sqrt(1.0 - pseudo_defect(z, w))) / math.tanh(r))
