r"""
Finite-dimensional model of the weighted Bergman space :math:`A^2_\omega`.

Polynomials of degree ``<= N`` are spanned by monomials ``z^alpha`` in graded
lexicographic order.  With the Gram matrix
``G[a, b] = int z^a conj(z^b) omega dv = L L^H`` the vectors
``L^{-1} (z^a)_a`` are the values of an orthonormal basis, so the truncated
reproducing kernel is

.. math::

    K_N(z, w) = \sum_k \phi_k(z)\,\overline{\phi_k(w)},
    \qquad \phi(z) = L^{-1} (z^\alpha)_\alpha .

The truncation error is of relative order ``(|z||w|)^{N+1}``; kernel values
are reliable for ``|z| |w| <= 0.6`` at the default degrees.
"""

from dataclasses import dataclass
import itertools
import logging
import math

import numpy as np
from scipy import linalg

from . import geometry as geo
from . import quadrature as qd
from . import weights as wt
from .errors import GramConditioningError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_DEGREE = {1: 24, 2: 12, 3: 8}
CONDITION_LIMIT = 1e12
_CHUNK = 16384


def multi_indices(n, N):
    """Exponent vectors of degree <= N, graded, lexicographically descending inside a degree."""
    out = []
    for d in range(N + 1):
        for combo in itertools.product(range(d, -1, -1), repeat=n):
            if sum(combo) == d:
                out.append(combo)
    return np.array(out, dtype=int).reshape(-1, n)


def monomials(z, basis):
    """Values ``z^alpha`` for each exponent row of ``basis``; shape (m, len(basis))."""
    z = np.atleast_2d(geo.as_points(z))
    N = int(basis.max()) if basis.size else 0
    powers = z[:, :, None] ** np.arange(N + 1)[None, None, :]
    out = np.ones((z.shape[0], len(basis)), dtype=complex)
    for j in range(z.shape[1]):
        out *= powers[:, j, basis[:, j]]
    return out


def monomial_moment(alpha):
    """``int |z^alpha|^2 dv = n! alpha! / (n + |alpha|)!`` for normalized volume."""
    alpha = [int(a) for a in alpha]
    n, k = len(alpha), sum(alpha)
    return math.exp(math.lgamma(n + 1) + sum(math.lgamma(a + 1) for a in alpha)
                    - math.lgamma(n + k + 1))


def gram_matrix(spec, basis, rule, radial=None):
    """
    Quadrature Gram matrix of the monomials in ``basis`` under ``spec``.

    For radial weights distinct monomials are orthogonal, so only the diagonal
    is integrated.
    """
    radial = wt.is_radial(spec) if radial is None else radial
    pts, wts = rule.nodes
    B = len(basis)
    gram = np.zeros((B, B), dtype=complex)
    diag = np.zeros(B)
    for start in range(0, len(wts), _CHUNK):
        p = pts[start:start + _CHUNK]
        weight = wts[start:start + _CHUNK] * wt.weight_eval(spec, p)
        if not np.all(np.isfinite(weight)):
            i = int(np.flatnonzero(~np.isfinite(weight))[0])
            raise FloatingPointError(f"weight not finite at node {start + i}: {p[i]!r}")
        E = monomials(p, basis)
        if radial:
            diag += weight @ (E.real**2 + E.imag**2)
        else:
            gram += (E * weight[:, None]).T @ np.conj(E)
    if radial:
        return np.diag(diag).astype(complex)
    return 0.5 * (gram + gram.conj().T)


@dataclass(frozen=True, eq=False)
class BergmanModel:
    spec: object
    n: int
    degree_cap: int
    basis: np.ndarray
    gram: np.ndarray
    chol: np.ndarray
    rule: object
    condition_estimate: float

    def orthonormal_values(self, z):
        """``L^{-1} (z^alpha)``; shape (len(basis), m)."""
        E = monomials(z, self.basis)
        return linalg.solve_triangular(self.chol, E.T, lower=True, check_finite=False)

    def kernel(self, z, w):
        """``K_N(z_i, w_i)`` for paired rows of ``z`` and ``w``."""
        a, b = self.orthonormal_values(z), self.orthonormal_values(w)
        return np.sum(a * np.conj(b), axis=0)

    def kernel_matrix(self, z, w):
        """``K_N(z_i, w_j)`` for all rows of ``z`` against all rows of ``w``."""
        a, b = self.orthonormal_values(z), self.orthonormal_values(w)
        return a.T @ np.conj(b)

    def norm_sq(self, z):
        """``||K_z||^2 = K_N(z, z)``."""
        a = self.orthonormal_values(z)
        return np.sum(a.real**2 + a.imag**2, axis=0)

    def polynomial(self, coeffs):
        """
        Callable for ``f = sum_k coeffs[k] phi_k``; ``||f||_{A^2} = ||coeffs||``.
        """
        coeffs = np.asarray(coeffs, dtype=complex)
        return lambda z: coeffs @ self.orthonormal_values(z)


def _factorize(gram):
    eig = linalg.eigvalsh(gram)
    lo, hi = float(eig[0]), float(eig[-1])
    cond = math.inf if lo <= 0 else hi / lo
    if lo <= hi / CONDITION_LIMIT:
        raise GramConditioningError(
            f"Gram matrix smallest eigenvalue {lo:.3e} vs largest {hi:.3e} "
            f"(condition estimate {cond:.3e} > {CONDITION_LIMIT:.0e}); "
            "raise the quadrature resolution or lower the degree cap", cond)
    try:
        chol = linalg.cholesky(gram, lower=True)
    except linalg.LinAlgError as exc:
        raise GramConditioningError(f"Cholesky failed: {exc}", cond) from exc
    return chol, cond


def build_model(spec, N=None, rule=None, n=None):
    """
    Assemble the Gram matrix of monomials of degree <= ``N`` and factorize it.

    ``n`` is taken from ``rule`` when given.  Raises
    :class:`GramConditioningError` when the Gram matrix is not numerically
    positive definite.
    """
    if rule is None:
        if n is None:
            raise ValueError("give a quadrature rule or the dimension n")
        rule = qd.ProductRule(n)
    n = rule.n
    N = DEFAULT_DEGREE[n] if N is None else int(N)
    if N < 1:
        raise ValueError("degree cap must be >= 1")
    basis = multi_indices(n, N)
    gram = gram_matrix(spec, basis, rule)
    return model_from_gram(spec, N, basis, gram, rule)


def model_from_gram(spec, N, basis, gram, rule):
    chol, cond = _factorize(gram)
    log.debug("model built: n=%d N=%d basis=%d cond=%.3e", rule.n, N, len(basis), cond)
    return BergmanModel(spec, rule.n, N, basis, gram, chol, rule, cond)


def kernel_eval(model, z, w):
    """Truncated kernel ``K_N(z, w)``; rows of ``z`` and ``w`` are paired."""
    out = model.kernel(z, w)
    return out[0] if np.ndim(z) == 1 and np.ndim(w) == 1 else out


def kernel_norm_sq(model, z):
    out = model.norm_sq(z)
    return out[0] if np.ndim(z) == 1 else out


# ---------------------------------------------------------------- test functions

@dataclass(frozen=True)
class TestFunctionParams:
    """Parameters ``(w, t, p)`` of the normalized test function ``f_{w,t}``."""

    __test__ = False  # not a pytest class

    w: np.ndarray
    t: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "w", geo.as_points(self.w))
        if not self.p > 0:
            raise ValidationError("p must be positive")
        if not self.t > 0:
            raise ValidationError("t must be positive")


def _q_s(spec):
    if isinstance(spec, wt.PotentialHarmonic):
        return spec.q, spec.s
    return spec.alpha, 0.0


def test_function_problems(t, spec, n):
    """Violations of ``t + q > n + 1 > 2 + q`` (needed for the uniform norm bound)."""
    q, _ = _q_s(spec)
    out = []
    if not t + q > n + 1:
        out.append(f"t + q = {t + q:g} violates t + q > n + 1 = {n + 1} (t + q > n + 1 > 2 + q)")
    if not n + 1 > 2 + q:
        out.append(f"q = {q:g} violates n + 1 > 2 + q (t + q > n + 1 > 2 + q)")
    return out


def vanishing_condition(t, spec, n):
    """``t + n - 1 > q + n s``: the test functions tend to 0 locally uniformly."""
    q, s = _q_s(spec)
    return t + n - 1 > q + n * s


def test_function_eval(params, spec, z):
    """
    ``f_{w,t}(z) = ((1-|w|^2)^{t+n-1} / omega(w))^{1/p} (1 - <z,w>)^{-(2n+t)/p}``
    with the principal branch of the power (``Re(1 - <z,w>) > 0`` on the ball).
    """
    z = geo.as_points(z)
    w = params.w
    n = w.shape[-1]
    pref = ((1.0 - geo.norm_sq(w)) ** (params.t + n - 1) / wt.weight_eval(spec, w)) ** (1.0 / params.p)
    return pref * (1.0 - geo.hermitian_inner(z, w)) ** (-(2 * n + params.t) / params.p)


def p_norm(f, spec, p, rule):
    """``(int |f|^p omega dv)^{1/p}`` by quadrature; returns ``(value, stderr)``."""
    if not p > 0:
        raise ValueError("p must be positive")
    value, err = qd.integrate_ball(lambda z: np.abs(f(z)) ** p * wt.weight_eval(spec, z), rule)
    value = float(np.real(value))
    norm = value ** (1.0 / p)
    return norm, (norm / (p * value) * err if err else 0.0)


def radial_power_integral(profile, c, w_abs, n, order=24):
    r"""
    ``int h(|z|^2) |1 - <z, w>|^{-2c} dv(z)`` for a radial density ``h``.

    The sphere average is a hypergeometric function of ``x |w|^2``; the radial
    integral uses graded panels resolving the layer of width ``1 - |w|^2``.
    """
    y = w_abs * w_abs
    layer = max(1.0 - y, 1e-15)
    h = lambda x: profile(x) * qd.sphere_power_average(c, n, x * y)
    return qd.radial_integral(h, n, layer=layer, order=order)


def forelli_rudin_weighted(spec, c, w_abs, n, order=24):
    """``int omega(z) |1 - <z, w>|^{-2c} dv(z)`` for a radial weight, ``|w| = w_abs``."""
    return radial_power_integral(lambda x: wt.radial_profile(spec, x), c, w_abs, n, order)


def test_function_norm(params, spec, rule=None, order=24):
    """
    ``||f_{w,t}||_{A^p_omega}``.

    Radial weights: exact sphere average plus graded radial panels of the
    given ``order``.  Otherwise ``rule`` is used for a direct ball quadrature.
    """
    w = params.w
    n = w.shape[-1]
    ww = float(geo.norm_sq(w))
    pref = (1.0 - ww) ** (params.t + n - 1) / float(wt.weight_eval(spec, w))
    if wt.is_radial(spec):
        c = (2 * n + params.t) / 2.0
        integral = forelli_rudin_weighted(spec, c, math.sqrt(ww), n, order)
        return (pref * integral) ** (1.0 / params.p)
    if rule is None:
        raise ValueError("non-radial weights need a quadrature rule")
    return p_norm(lambda z: test_function_eval(params, spec, z), spec, params.p, rule)[0]


# ---------------------------------------------------------------- kernel constant

def estimate_a_r(model, r, pair_count, seed, center_radius=0.5):
    """
    Empirical constant with ``||K_z|| / ||K_a||`` in ``[1/a_r, a_r]`` for
    ``z`` in ``D(a, r)``.

    Centers are uniform in ``|a| < center_radius``.  Offsets are drawn once at
    Bergman distance uniform in ``[0, 1)`` and kept when below ``r``, so the
    sample sets are nested and the estimate is nondecreasing in ``r``.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    n = model.n
    a = geo.sample_ball(n, pair_count, rng, radius=center_radius)
    dirs = geo.sample_sphere(n, pair_count, rng)
    dist = rng.random(pair_count)
    keep = dist < r
    if not np.any(keep):
        return 1.0
    u = np.tanh(dist[keep])[:, None] * dirs[keep]
    z = geo.involution(a[keep], u)
    ratio = np.sqrt(model.norm_sq(z) / model.norm_sq(a[keep]))
    return float(max(np.max(ratio), np.max(1.0 / ratio), 1.0))
