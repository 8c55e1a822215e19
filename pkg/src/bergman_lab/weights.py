r"""
Green potentials, invariant Poisson integrals and the weights built from them.

The potential-harmonic weight is

.. math::

    \omega(z) = (1-|z|^2)^q \int_{\mathbb{B}} G(z,w)^s\,d\mu(w)
                + \int_{\partial\mathbb{B}} P(z,\xi)\,d\nu(\xi),

with ``G(z, w) = g(phi_z(w))``.  Two radial comparison weights sit beside
it: ``(1-|z|^2)^alpha`` and the oscillatory
``(1-|z|^2)^alpha (1 + sin(|z|^-2))``; both are flagged ``in_class = False``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import measures as ms
from .errors import PoleError, ValidationError

POLE_RADIUS = 1e-6
OSCILLATION_CLAMP = 1e-3
_SERIES_TERMS = 64


def _series_part(X, n):
    m = np.arange(_SERIES_TERMS)
    terms = (-1.0) ** m * X[:, None] ** (n + m) / (n + m)
    return np.sum(terms, axis=1)


def _closed_part(X, n):
    total = (-1.0) ** (n - 1) * np.log1p(X)
    for k in range(n - 1):
        total = total + (-1.0) ** (n - 2 - k) * X ** (k + 1) / (k + 1)
    return total


def green_from_defect(defect, n):
    r"""
    ``g`` as a function of ``d = 1 - |z|^2``.

    With ``X = d / (1 - d)`` the defining integral becomes
    ``(n+1)/(4n) * int_0^X y^{n-1} / (1+y) dy``; that is summed as a power
    series for ``X < 1/2`` (no cancellation near the sphere) and in closed
    form otherwise.
    """
    d = np.asarray(defect, dtype=float)
    if np.any(d >= 1.0):
        raise PoleError("Green function pole at the origin")
    return _green_from_ratio(d / (1.0 - d), n)


def _green_from_ratio(X, n):
    X = np.asarray(X, dtype=float)
    shape = X.shape
    X = X.reshape(-1)
    out = np.empty_like(X)
    small = X < 0.5
    out[small] = _series_part(X[small], n)
    out[~small] = _closed_part(X[~small], n)
    return ((n + 1) / (4.0 * n) * out).reshape(shape)


def green_g(z):
    """Radial Green function ``g`` of the ball; pole at 0, zero on the sphere."""
    z = geo.as_points(z)
    zz = geo.norm_sq(z)
    if np.any(zz > 1.0):
        raise geo.NonInteriorError("green_g needs |z| <= 1")
    if np.any(zz == 0.0):
        raise PoleError("green_g has a pole at z = 0")
    # X from |z|^2 directly keeps full precision near the pole
    return _green_from_ratio((1.0 - zz) / zz, z.shape[-1])


def green_G(z, w):
    """Green function ``G(z, w) = g(phi_z(w))``; symmetric, pole on the diagonal."""
    z, w = geo.as_points(z), geo.as_points(w)
    d = geo.pseudo_defect(z, w)
    if np.any(d >= 1.0):
        raise PoleError("green_G has a pole at z = w")
    return green_from_defect(d, z.shape[-1])


def green_ratio(z, w):
    """``G(z,w) / [(1-gamma^2)^n gamma^{-2(n-1)}]``, bounded above and below."""
    z, w = geo.as_points(z), geo.as_points(w)
    n = z.shape[-1]
    d = geo.pseudo_defect(z, w)
    gam2 = 1.0 - d
    return green_from_defect(d, n) / (d**n * gam2 ** (-(n - 1)))


def potential_U(mu, s, z):
    """
    Green potential ``sum_i m_i G(z, w_i)^s`` of an atomic measure.

    ``s = 0`` returns the total mass.  Points within ``POLE_RADIUS`` of an
    atom raise :class:`PoleError` naming the atom.
    """
    z = geo.as_points(z)
    if s < 0:
        raise ValidationError("s must be >= 0")
    if mu is ms.ZERO or isinstance(mu, ms.ZeroMeasure):
        return np.zeros(z.shape[:-1])
    if not isinstance(mu, ms.AtomicBall):
        raise TypeError("Green potentials are implemented for atomic measures only")
    if s == 0:
        return np.full(z.shape[:-1], ms.total_mass(mu))
    total = np.zeros(z.shape[:-1])
    for atom, mass in zip(mu.points, mu.masses):
        dist = np.sqrt(geo.norm_sq(z - atom))
        if np.any(dist < POLE_RADIUS):
            raise PoleError(f"evaluation point within {POLE_RADIUS:g} of atom {atom!r}")
        total = total + mass * green_from_defect(geo.pseudo_defect(z, atom), z.shape[-1]) ** s
    return total


def poisson_kernel(z, xi):
    """Invariant Poisson kernel ``(1-|z|^2)^n / |1 - <z, xi>|^{2n}``."""
    z, xi = geo.as_points(z), geo.as_points(xi)
    if np.any(np.abs(np.sqrt(geo.norm_sq(xi)) - 1.0) > ms.SPHERE_TOL):
        raise ValueError("xi must lie on the unit sphere")
    n = z.shape[-1]
    return (1.0 - geo.norm_sq(z)) ** n / np.abs(1.0 - geo.hermitian_inner(z, xi)) ** (2 * n)


def poisson_integral(nu, z):
    """
    ``P_nu(z)``: exact sum for atoms; for the uniform measure the invariant
    mean-value identity gives the mass itself.
    """
    z = geo.as_points(z)
    if np.any(geo.norm_sq(z) >= 1.0):
        raise geo.NonInteriorError("poisson_integral needs |z| < 1")
    if nu is ms.ZERO or isinstance(nu, ms.ZeroMeasure):
        return np.zeros(z.shape[:-1])
    if isinstance(nu, ms.UniformBoundary):
        return np.full(z.shape[:-1], float(nu.mass))
    if isinstance(nu, ms.AtomicBoundary):
        total = np.zeros(z.shape[:-1])
        for xi, mass in zip(nu.points, nu.masses):
            total = total + mass * poisson_kernel(z, xi)
        return total
    raise TypeError(f"not a boundary measure: {nu!r}")


# ---------------------------------------------------------------- weights

def potential_harmonic_problems(mu, q, s, nu):
    """Violated hypotheses on ``(mu, q, s, nu)``; empty when the weight is admissible."""
    out = []
    if not q > -2:
        out.append(f"q={q} violates q > -2")
    if not s >= 0:
        out.append(f"s={s} violates s >= 0")
    if not q + s > -1:
        out.append(f"q + s = {q + s} violates q + s > -1")
    if ms.total_mass(mu) == 0 and ms.total_mass(nu) == 0:
        out.append("mu and nu are both zero; the weight would vanish identically")
    return out


@dataclass(frozen=True, eq=False)
class PotentialHarmonic:
    mu: object = ms.ZERO
    q: float = 0.0
    s: float = 1.0
    nu: object = ms.ZERO
    in_class: bool = field(default=True, init=False)

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValidationError("; ".join(problems))

    def problems(self):
        return potential_harmonic_problems(self.mu, self.q, self.s, self.nu)

    def q_plus_ns(self, n):
        return self.q + n * self.s


@dataclass(frozen=True)
class ReferenceRadial:
    alpha: float
    in_class: bool = field(default=False, init=False)

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValidationError(f"alpha={self.alpha} violates alpha > -1")


@dataclass(frozen=True)
class Oscillatory:
    alpha: float
    in_class: bool = field(default=False, init=False)

    def __post_init__(self):
        if not self.alpha > -1:
            raise ValidationError(f"alpha={self.alpha} violates alpha > -1")


def unit_weight(n):
    """``omega == 1``: no potential, uniform boundary measure of mass 1."""
    return PotentialHarmonic(ms.ZERO, 0.0, 0.0, ms.UniformBoundary(1.0, n))


def _oscillation(zz):
    return 1.0 + np.sin(1.0 / np.maximum(zz, OSCILLATION_CLAMP**2))


def weight_eval(spec, z):
    """Evaluate the weight at point(s) ``z`` (shape (..., n))."""
    z = geo.as_points(z)
    zz = geo.norm_sq(z)
    if np.any(zz >= 1.0):
        raise geo.NonInteriorError("weights are evaluated inside the ball only")
    if isinstance(spec, PotentialHarmonic):
        out = poisson_integral(spec.nu, z)
        if ms.total_mass(spec.mu) > 0:
            out = out + (1.0 - zz) ** spec.q * potential_U(spec.mu, spec.s, z)
        return out
    if isinstance(spec, ReferenceRadial):
        return (1.0 - zz) ** spec.alpha
    if isinstance(spec, Oscillatory):
        return (1.0 - zz) ** spec.alpha * _oscillation(zz)
    raise TypeError(f"not a weight spec: {spec!r}")


def is_radial(spec):
    if isinstance(spec, (ReferenceRadial, Oscillatory)):
        return True
    return ms.is_radial(spec.mu) and ms.is_radial(spec.nu)


def radial_profile(spec, x):
    """The weight of a radial spec as a function of ``x = |z|^2``."""
    if not is_radial(spec):
        raise ValueError("weight is not radial")
    x = np.asarray(x, dtype=float)
    if isinstance(spec, ReferenceRadial):
        return (1.0 - x) ** spec.alpha
    if isinstance(spec, Oscillatory):
        return (1.0 - x) ** spec.alpha * _oscillation(x)
    n = spec.nu.dim if isinstance(spec.nu, ms.UniformBoundary) else spec.mu.dim
    out = np.full(x.shape, ms.total_mass(spec.nu))
    if ms.total_mass(spec.mu) > 0:
        if spec.s == 0:
            pot = ms.total_mass(spec.mu)
        else:
            pot = ms.total_mass(spec.mu) * green_from_defect(1.0 - x, n) ** spec.s
        out = out + (1.0 - x) ** spec.q * pot
    return out


def comparability_ratio(spec, a, r, sample_count, seed):
    """
    ``(max, min)`` of ``omega(z) / omega(a)`` over sampled ``z`` in ``D(a, r)``.

    Half the samples lie on the boundary of the Bergman ball.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    a = geo.as_points(a)
    rng = np.random.default_rng(seed)
    z = geo.sample_bergman_ball(a, r, sample_count, rng, boundary_fraction=0.5)
    ratios = weight_eval(spec, z) / weight_eval(spec, a)
    return float(np.max(ratios)), float(np.min(ratios))


# ---------------------------------------------------------------- JSON

def weight_to_json(spec):
    if isinstance(spec, PotentialHarmonic):
        return {"type": "potential_harmonic", "q": spec.q, "s": spec.s,
                "mu": ms.measure_to_json(spec.mu), "nu": ms.measure_to_json(spec.nu)}
    if isinstance(spec, ReferenceRadial):
        return {"type": "reference_radial", "alpha": spec.alpha}
    if isinstance(spec, Oscillatory):
        return {"type": "oscillatory", "alpha": spec.alpha}
    raise TypeError(f"not a weight spec: {spec!r}")


def weight_from_json(obj, n, named_measures=None):
    """
    Build a weight spec from JSON.  ``mu`` / ``nu`` may be inline measure
    objects or names looked up in ``named_measures``.
    """
    named_measures = named_measures or {}

    def measure(ref):
        if ref is None:
            return ms.ZERO
        if isinstance(ref, str):
            if ref not in named_measures:
                raise ValidationError(f"unknown measure name {ref!r}")
            return named_measures[ref]
        return ms.measure_from_json(ref, n)

    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "potential_harmonic":
        return PotentialHarmonic(measure(obj.get("mu")), float(obj.get("q", 0.0)),
                                 float(obj.get("s", 1.0)), measure(obj.get("nu")))
    if kind == "reference_radial":
        return ReferenceRadial(float(obj["alpha"]))
    if kind == "oscillatory":
        return Oscillatory(float(obj["alpha"]))
    raise ValidationError(f"unknown weight type {kind!r}")
