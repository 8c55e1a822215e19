"""
Finite positive measures on the ball and on the sphere.

Ball measures: :class:`AtomicBall`, :class:`RadialDensity` and :data:`ZERO`.
Sphere measures: :class:`AtomicBoundary`, :class:`UniformBoundary` and
:data:`ZERO`.  All are immutable.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special

from . import geometry as geo
from .errors import ValidationError

SPHERE_TOL = 1e-12


@dataclass(frozen=True)
class ZeroMeasure:
    def __repr__(self):
        return "ZERO"


ZERO = ZeroMeasure()


def _atoms(points, masses):
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    masses = np.atleast_1d(np.asarray(masses, dtype=float))
    if points.shape[0] != masses.shape[0]:
        raise ValidationError("number of atom points and masses differ")
    if points.shape[0] == 0:
        raise ValidationError("atomic measure needs at least one atom")
    if np.any(~np.isfinite(masses)) or np.any(masses <= 0):
        raise ValidationError("atom masses must be positive and finite")
    points.setflags(write=False)
    masses.setflags(write=False)
    return points, masses


@dataclass(frozen=True, eq=False)
class AtomicBall:
    """Finite sum of point masses at interior points."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        points, masses = _atoms(self.points, self.masses)
        if np.any(geo.norm_sq(points) >= 1.0):
            raise ValidationError("ball atoms must lie strictly inside the unit ball")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class RadialDensity:
    """``d eta = scale * (1 - |z|^2)^beta dv`` with normalized volume ``dv``."""

    beta: float
    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if not self.beta > -1:
            raise ValidationError(f"radial density exponent beta={self.beta} must exceed -1")
        if not self.scale > 0:
            raise ValidationError("radial density scale must be positive")
        geo.check_dimension(self.dim)


@dataclass(frozen=True, eq=False)
class AtomicBoundary:
    """Finite sum of point masses on the unit sphere."""

    points: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        points, masses = _atoms(self.points, self.masses)
        norms = np.sqrt(geo.norm_sq(points))
        if np.any(np.abs(norms - 1.0) > SPHERE_TOL):
            raise ValidationError("boundary atoms must lie on the unit sphere")
        points = points / norms[:, None]
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "masses", masses)

    @property
    def dim(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class UniformBoundary:
    """``mass`` times the normalized surface measure of the sphere."""

    mass: float = 1.0
    dim: int = field(default=2)

    def __post_init__(self):
        if not self.mass > 0:
            raise ValidationError("uniform boundary mass must be positive")


def total_mass(m):
    if m is ZERO or isinstance(m, ZeroMeasure):
        return 0.0
    if isinstance(m, (AtomicBall, AtomicBoundary)):
        return float(np.sum(m.masses))
    if isinstance(m, UniformBoundary):
        return float(m.mass)
    if isinstance(m, RadialDensity):
        n, b = m.dim, m.beta
        # int (1-|z|^2)^b dv = n B(n, b+1)
        return m.scale * math.exp(math.log(n) + special.betaln(n, b + 1))
    raise TypeError(f"not a measure: {m!r}")


def _radial_ball_mass_quadrature(m, center, r, order):
    n, b = m.dim, m.beta
    R2 = math.tanh(r) ** 2
    ww = float(geo.norm_sq(center))
    c = n + 1 + b
    x, wts = special.roots_legendre(order)
    x = 0.5 * R2 * (x + 1.0)
    wts = 0.5 * R2 * wts
    sphere_avg = special.hyp2f1(c, c, n, x * ww)
    integral = n * np.sum(wts * x ** (n - 1) * (1.0 - x) ** b * sphere_avg)
    return m.scale * (1.0 - ww) ** c * integral


def _radial_ball_mass_montecarlo(m, center, r, count, seed):
    n, b = m.dim, m.beta
    rng = np.random.default_rng(seed)
    R = math.tanh(r)
    u = geo.sample_ball(n, count, rng, radius=R)
    ww = float(geo.norm_sq(center))
    c = n + 1 + b
    vals = (1.0 - geo.norm_sq(u)) ** b / np.abs(1.0 - geo.hermitian_inner(u, center)) ** (2 * c)
    vals *= m.scale * (1.0 - ww) ** c * R ** (2 * n)
    return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(count))


def ball_mass(m, center, r, method="quadrature", order=64, count=100_000, seed=0):
    """
    Mass of the Bergman ball ``D(center, r)``; returns ``(value, stderr)``.

    For :class:`RadialDensity` the ball is pulled back to ``|u| < tanh r``
    through the involution at ``center``.  The spherical average of the
    transformed density is a Gauss hypergeometric function, leaving a smooth
    integral over ``[0, tanh(r)^2]`` that Gauss-Legendre handles at any
    ``|center| < 1`` (``method="quadrature"``, stderr 0).
    ``method="montecarlo"`` averages the same integrand over uniform samples.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    center = geo.as_points(center)
    if m is ZERO or isinstance(m, ZeroMeasure):
        return 0.0, 0.0
    if isinstance(m, AtomicBall):
        inside = geo.in_bergman_ball(center, r, m.points)
        return float(np.sum(m.masses[inside])), 0.0
    if isinstance(m, RadialDensity):
        if method == "quadrature":
            return float(_radial_ball_mass_quadrature(m, center, r, order)), 0.0
        if method == "montecarlo":
            return _radial_ball_mass_montecarlo(m, center, r, count, seed)
        raise ValueError(f"unknown method {method!r}")
    raise TypeError(f"ball_mass needs a ball measure, got {m!r}")


def sample(m, count, seed):
    """``count`` i.i.d. draws from the normalized measure ``m``; shape (count, n)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    if m is ZERO or isinstance(m, ZeroMeasure):
        raise ValidationError("cannot sample the zero measure")
    if isinstance(m, (AtomicBall, AtomicBoundary)):
        idx = rng.choice(len(m.masses), size=count, p=m.masses / np.sum(m.masses))
        return np.array(m.points[idx])
    if isinstance(m, UniformBoundary):
        return geo.sample_sphere(m.dim, count, rng)
    if isinstance(m, RadialDensity):
        u = geo.sample_sphere(m.dim, count, rng)
        rho2 = rng.beta(m.dim, m.beta + 1.0, size=count)
        return np.sqrt(rho2)[:, None] * u
    raise TypeError(f"not a measure: {m!r}")


def is_radial(m):
    """True when the measure is invariant under unitary maps."""
    if m is ZERO or isinstance(m, (ZeroMeasure, RadialDensity, UniformBoundary)):
        return True
    if isinstance(m, AtomicBall):
        return bool(np.all(geo.norm_sq(m.points) == 0.0))
    return False


# ---------------------------------------------------------------- JSON

def _point_to_json(p):
    return [[float(c.real), float(c.imag)] for c in p]


def _point_from_json(obj):
    return np.array([complex(re, im) for re, im in obj])


def measure_to_json(m):
    if m is ZERO or isinstance(m, ZeroMeasure):
        return {"type": "zero"}
    if isinstance(m, AtomicBall):
        return {"type": "atomic_ball", "atoms": [
            {"point": _point_to_json(p), "mass": float(w)} for p, w in zip(m.points, m.masses)]}
    if isinstance(m, AtomicBoundary):
        return {"type": "atomic_boundary", "atoms": [
            {"point": _point_to_json(p), "mass": float(w)} for p, w in zip(m.points, m.masses)]}
    if isinstance(m, UniformBoundary):
        return {"type": "uniform_boundary", "mass": float(m.mass)}
    if isinstance(m, RadialDensity):
        return {"type": "radial_density", "beta": float(m.beta), "scale": float(m.scale)}
    raise TypeError(f"not a measure: {m!r}")


def measure_from_json(obj, n):
    """Build a measure from its tagged JSON object; ``n`` is the ambient dimension."""
    try:
        kind = obj["type"]
    except (TypeError, KeyError):
        raise ValidationError(f"measure object needs a 'type' field: {obj!r}") from None
    if kind == "zero":
        return ZERO
    if kind in ("atomic_ball", "atomic_boundary"):
        atoms = obj.get("atoms") or []
        pts = [_point_from_json(a["point"]) for a in atoms]
        if any(len(p) != n for p in pts):
            raise ValidationError(f"atom dimension differs from n={n}")
        cls = AtomicBall if kind == "atomic_ball" else AtomicBoundary
        return cls(np.array(pts).reshape(len(pts), n), [a["mass"] for a in atoms])
    if kind == "uniform_boundary":
        return UniformBoundary(float(obj.get("mass", 1.0)), n)
    if kind == "radial_density":
        return RadialDensity(float(obj["beta"]), n, float(obj.get("scale", 1.0)))
    raise ValidationError(f"unknown measure type {kind!r}")
