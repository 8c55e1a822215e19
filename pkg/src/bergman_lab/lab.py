"""
Sweeps that turn two-sided estimates into recorded ratio series.

A two-sided estimate ``A ~ B`` becomes a :class:`RatioSeries` of ``A / B``
over a grid, with its sup and inf.  Behaviour toward the sphere is judged by
:func:`growth_verdict` on the per-level maxima:

* ``diverging`` -- growth by a factor >= 2 per level over the three
  outermost levels,
* ``bounded`` -- each of the last two level-to-level factors below 1.25,
* ``inconclusive`` -- anything else.

Every random stream is derived from ``(seed, task index)`` so results do not
depend on evaluation order.
"""

from dataclasses import dataclass, field
import logging
import math

import numpy as np

from . import geometry as geo
from . import measures as ms
from . import model as md
from . import quadrature as qd
from . import weights as wt
from .errors import PoleError, ValidationError

log = logging.getLogger(__name__)

GROWTH_FACTOR = 2.0
FLAT_FACTOR = 1.25
KERNEL_LEVELS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


def task_rng(seed, index):
    """Independent generator for task ``index`` of a sweep seeded with ``seed``."""
    return np.random.default_rng([int(seed), int(index)])


@dataclass(frozen=True)
class GridSpec:
    radial_levels: tuple
    directions_per_level: int = 1
    seed: int = 0

    def __post_init__(self):
        levels = tuple(float(x) for x in self.radial_levels)
        if not levels:
            raise ValidationError("grid needs at least one radial level")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValidationError("radial levels must be strictly increasing")
        if levels[0] < 0 or levels[-1] >= 1:
            raise ValidationError("radial levels must lie in [0, 1)")
        if self.directions_per_level < 1:
            raise ValidationError("directions_per_level must be >= 1")
        object.__setattr__(self, "radial_levels", levels)

    def points(self, n):
        """``(levels, points)`` with ``directions_per_level`` rows per level."""
        lev, pts = [], []
        for i, rho in enumerate(self.radial_levels):
            u = geo.sample_sphere(n, self.directions_per_level, task_rng(self.seed, i))
            pts.append(rho * u)
            lev.extend([rho] * self.directions_per_level)
        return np.array(lev), np.concatenate(pts)


@dataclass
class RatioSeries:
    """
    Named ratio samples.  ``parameters`` is the sweep variable (a radial level,
    ``t`` or a pair index), ``values`` the raw numerator and ``ratios`` the
    normalized quantity whose sup/inf is the evidence.
    """

    name: str
    parameters: np.ndarray
    ratios: np.ndarray
    values: np.ndarray = None
    stderr: np.ndarray = None
    verdict: str = "bounded"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.parameters = np.asarray(self.parameters, dtype=float)
        self.ratios = np.asarray(self.ratios, dtype=float)
        m = len(self.ratios)
        self.values = np.full(m, np.nan) if self.values is None else np.asarray(self.values, dtype=float)
        self.stderr = np.zeros(m) if self.stderr is None else np.asarray(self.stderr, dtype=float)

    @property
    def points(self):
        return list(zip(self.parameters.tolist(), self.ratios.tolist()))

    @property
    def sup(self):
        return float(np.max(self.ratios)) if len(self.ratios) else math.nan

    @property
    def inf(self):
        return float(np.min(self.ratios)) if len(self.ratios) else math.nan

    @property
    def band(self):
        """``sup / inf``."""
        return self.sup / self.inf

    def level_max(self):
        """Per-parameter maxima, parameters ascending."""
        levels = np.unique(self.parameters)
        return levels, np.array([np.max(self.ratios[self.parameters == x]) for x in levels])


# ---------------------------------------------------------------- verdicts

def growth_verdict(values):
    """Classify a sequence of per-level values ordered toward the sphere."""
    v = np.asarray(values, dtype=float)
    if len(v) < 3 or not np.all(np.isfinite(v)):
        return "inconclusive"
    tail = v[-3:]
    if np.any(tail <= 0):
        return "inconclusive"
    steps = tail[1:] / tail[:-1]
    if np.all(steps >= GROWTH_FACTOR):
        return "diverging"
    if np.all(steps < FLAT_FACTOR):
        return "bounded"
    return "inconclusive"


def loglog_slope(levels, values, tail=3):
    """Least-squares slope of ``log value`` against ``log(1 - level^2)`` over the last ``tail`` levels."""
    x = np.log(1.0 - np.asarray(levels, dtype=float) ** 2)[-tail:]
    y = np.log(np.asarray(values, dtype=float))[-tail:]
    return float(np.polyfit(x, y, 1)[0])


def carleson_exponent(alpha, beta, n, p, p_tilde):
    """Power of ``1 - |w|^2`` in the Carleson ratio of ``(1-|z|^2)^beta dv`` against ``(1-|z|^2)^alpha``."""
    return beta - alpha - (n + 1) * (p_tilde / p - 1.0)


def carleson_threshold(alpha, n, p, p_tilde):
    """
    Smallest ``beta`` for which ``(1-|z|^2)^beta dv`` is a ``p_tilde``-Carleson
    measure for ``A^p`` with weight ``(1-|z|^2)^alpha``: the Carleson ratio
    exponent must be nonnegative.
    """
    return alpha + (n + 1) * (p_tilde / p - 1.0)


def _finish_boundary_series(series, tail=3):
    levels, maxima = series.level_max()
    series.verdict = growth_verdict(maxima)
    if len(levels) >= 2 and np.all(maxima > 0):
        series.meta["slope"] = loglog_slope(levels, maxima, tail=min(tail, len(levels)))
    return series


def _measure_dim(m, fallback):
    return getattr(m, "dim", fallback)


# ---------------------------------------------------------------- Carleson / embedding

def carleson_ratio_sweep(eta, spec, p, p_tilde, r, grid, n=None):
    """
    ``eta(D(w, r)) / (omega(w)^{p~/p} (1-|w|^2)^{(n+1) p~/p})`` at the grid centers.

    Centers colliding with a pole of the weight are skipped and logged.
    """
    if not (p > 0 and p_tilde > 0):
        raise ValueError("p and p_tilde must be positive")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    n = n or _measure_dim(eta, None) or _measure_dim(getattr(spec, "nu", None), 2)
    levels, centers = grid.points(n)
    params, vals, ratios = [], [], []
    for rho, w in zip(levels, centers):
        try:
            om = float(wt.weight_eval(spec, w))
        except PoleError as exc:
            log.warning("carleson sweep: skipping center %r (%s)", w, exc)
            continue
        mass, _ = ms.ball_mass(eta, w, r)
        denom = om ** (p_tilde / p) * (1.0 - geo.norm_sq(w)) ** ((n + 1) * p_tilde / p)
        params.append(rho)
        vals.append(mass)
        ratios.append(mass / denom)
    series = RatioSeries("carleson", params, ratios, vals,
                         meta={"p": p, "p_tilde": p_tilde, "r": r})
    return _finish_boundary_series(series)


def _measure_power_integral(eta, fp, spec, p_tilde, n):
    """``int |f_{w,t}|^{p~} d eta``."""
    if isinstance(eta, ms.AtomicBall):
        vals = np.abs(md.test_function_eval(fp, spec, eta.points)) ** p_tilde
        return float(np.sum(eta.masses * vals))
    if isinstance(eta, ms.RadialDensity):
        w = fp.w
        ww = float(geo.norm_sq(w))
        pref = ((1.0 - ww) ** (fp.t + n - 1) / float(wt.weight_eval(spec, w))) ** (p_tilde / fp.p)
        c = (2 * n + fp.t) * p_tilde / (2.0 * fp.p)
        prof = lambda x: eta.scale * (1.0 - x) ** eta.beta
        return pref * md.radial_power_integral(prof, c, math.sqrt(ww), n)
    raise TypeError(f"unsupported measure {eta!r}")


def embedding_ratio_sweep(eta, spec, p, p_tilde, family, model=None):
    """
    ``(int |f|^{p~} d eta)^{1/p~} / ||f||_{A^p_omega}`` over test functions.

    Norms of test functions under radial weights use the exact sphere average;
    other weights use the quadrature rule of ``model``.
    """
    if not family:
        raise ValueError("test function family is empty")
    n = family[0].w.shape[-1]
    rule = model.rule if model is not None else None
    params, vals, ratios = [], [], []
    for fp in family:
        num = _measure_power_integral(eta, fp, spec, p_tilde, n) ** (1.0 / p_tilde)
        norm = md.test_function_norm(md.TestFunctionParams(fp.w, fp.t, p), spec, rule)
        if not norm > 0:
            raise ZeroDivisionError(f"test function at w={fp.w!r} has zero norm")
        params.append(math.sqrt(float(geo.norm_sq(fp.w))))
        vals.append(num)
        ratios.append(num / norm)
    series = RatioSeries("embedding", params, ratios, vals, meta={"p": p, "p_tilde": p_tilde})
    return _finish_boundary_series(series)


def test_function_family(levels, t, p, n, seed=0):
    """One test function per radial level, each in a seeded random direction."""
    grid = GridSpec(levels, 1, seed)
    _, pts = grid.points(n)
    return [md.TestFunctionParams(w, t, p) for w in pts]


def test_function_sweep(spec, t, p, levels, n, z_radius=0.5, z_count=256, seed=0, order=24):
    """
    Norms ``||f_{w,t}||_{A^p_omega}`` along a boundary-approaching ``w`` grid,
    and ``max |f_{w,t}|`` over a fixed sample of ``|z| <= z_radius``.

    Returns ``(norm_series, sup_series)``.
    """
    family = test_function_family(levels, t, p, n, seed)
    z = geo.sample_ball(n, z_count, task_rng(seed, len(levels)), radius=z_radius)
    z[0] = 0.0
    lv, norms, peaks = [], [], []
    for fp in family:
        lv.append(math.sqrt(float(geo.norm_sq(fp.w))))
        norms.append(md.test_function_norm(fp, spec, order=order))
        peaks.append(float(np.max(np.abs(md.test_function_eval(fp, spec, z)))))
    hyp = md.test_function_problems(t, spec, n)
    norm_series = RatioSeries("test_function_norm", lv, norms, norms,
                              verdict="bounded" if np.all(np.isfinite(norms)) else "inconclusive",
                              meta={"t": t, "p": p, "hypothesis_violations": hyp})
    peak_series = RatioSeries("test_function_sup", lv, peaks, peaks,
                              meta={"t": t, "p": p,
                                    "vanishing_condition": md.vanishing_condition(t, spec, n)})
    peak_series.verdict = "bounded"
    return norm_series, peak_series


# ---------------------------------------------------------------- kernel sweeps

def norm_estimate_sweep(model, grid):
    """
    ``K_N(z,z) (1-|z|^2)^{n+1} omega(z)`` over the grid.

    The evidence is the band ``sup / inf``; the verdict only records that
    every ratio is finite and positive.
    """
    levels, z = grid.points(model.n)
    k = model.norm_sq(z)
    ratios = k * (1.0 - geo.norm_sq(z)) ** (model.n + 1) * wt.weight_eval(model.spec, z)
    ok = np.all(np.isfinite(ratios)) and np.all(ratios > 0)
    return RatioSeries("norm_estimate", levels, ratios, k,
                       verdict="bounded" if ok else "inconclusive")


def local_kernel_equivalence_sweep(model, r, grid, a_r=None, pairs_per_center=8, a_r_pairs=2000):
    """
    ``|K(z,w)| / sqrt(K(z,z) K(w,w))`` for ``|z - w| < alpha (1-|z|^2)``.

    ``alpha`` comes from :func:`inclusion_constants` with divisor 16 and the
    model's empirical ``a_r`` (estimated when not supplied).
    """
    if a_r is None:
        a_r = md.estimate_a_r(model, r, a_r_pairs, grid.seed)
    const = geo.inclusion_constants(r, model.n, a_r, divisor=16)
    levels, centers = grid.points(model.n)
    zs, ws, params = [], [], []
    for i, (rho, z) in enumerate(zip(levels, centers)):
        rng = task_rng(grid.seed, 1000 + i)
        radius = const.alpha * (1.0 - rho * rho)
        u = geo.sample_ball(model.n, pairs_per_center, rng, radius=radius)
        u[0] = 0.0
        zs.append(np.repeat(z[None, :], pairs_per_center, axis=0))
        ws.append(z + u)
        params.extend([rho] * pairs_per_center)
    z, w = np.concatenate(zs), np.concatenate(ws)
    kzw = np.abs(model.kernel(z, w))
    ratios = kzw / np.sqrt(model.norm_sq(z) * model.norm_sq(w))
    return RatioSeries("local_kernel_equivalence", params, ratios, kzw,
                       meta={"alpha": const.alpha, "a_r": a_r, "r": r,
                             "proof_lower_bound": 0.5 / a_r})


def decay_pairs(n, pair_count, seed, radius=0.6):
    """
    Pairs ``(z, w)`` inside ``|.| <= radius``: the first half near the
    diagonal, the rest roughly antipodal.
    """
    z = np.empty((pair_count, n), dtype=complex)
    w = np.empty_like(z)
    half = pair_count // 2
    for i in range(pair_count):
        rng = task_rng(seed, i)
        zi = geo.sample_ball(n, 1, rng, radius=radius)[0]
        if i < half:
            wi = zi + geo.sample_ball(n, 1, rng, radius=0.05)[0]
        else:
            wi = -zi * rng.uniform(0.5, 1.0) + geo.sample_ball(n, 1, rng, radius=0.05)[0]
        nw = math.sqrt(float(geo.norm_sq(wi)))
        if nw > radius:
            wi = wi * (radius / nw)
        z[i], w[i] = zi, wi
    return z, w


def pointwise_decay_sweep(model, t_decay, pair_count, seed):
    """
    ``|K(z,w)|^2 / [K(z,z) K(w,w) X^t]`` with ``X = 1 - gamma(z,w)^2``.

    The sup is the empirical decay constant; the constant from the proof,
    ``(t (1-t)^2)^{-1}``, is stored in ``meta``.
    """
    if not 0 < t_decay < 1:
        raise ValueError("t_decay must lie in (0, 1)")
    z, w = decay_pairs(model.n, pair_count, seed)
    x = geo.pseudo_defect(z, w)
    k2 = np.abs(model.kernel(z, w)) ** 2
    ratios = k2 / (model.norm_sq(z) * model.norm_sq(w) * x**t_decay)
    return RatioSeries(f"pointwise_decay_t{t_decay:g}", np.arange(pair_count), ratios, x,
                       meta={"t_decay": t_decay,
                             "proof_constant": 1.0 / (t_decay * (1.0 - t_decay) ** 2)})


def difference_bound_sweep(model, r, trial_count, seed, a_r=None, radius=0.6, a_r_pairs=2000):
    """
    ``|f(z) - f(w)| / ((|z-w| / (1-|z|^2)) sqrt(K(z,z)))`` for random
    unit-norm polynomials ``f`` and ``|z - w| < C (1-|z|^2)``.

    ``C`` uses divisor 4.  The bound ``4 a_r sqrt(n) / C`` is stored in
    ``meta["bound"]``.
    """
    if a_r is None:
        a_r = md.estimate_a_r(model, r, a_r_pairs, seed)
    const = geo.inclusion_constants(r, model.n, a_r, divisor=4)
    B = len(model.basis)
    coeffs = np.empty((trial_count, B), dtype=complex)
    z = np.empty((trial_count, model.n), dtype=complex)
    w = np.empty_like(z)
    for i in range(trial_count):
        rng = task_rng(seed, i)
        c = rng.standard_normal(B) + 1j * rng.standard_normal(B)
        coeffs[i] = c / np.linalg.norm(c)
        z[i] = geo.sample_ball(model.n, 1, rng, radius=radius)[0]
        rad = const.big_c * (1.0 - float(geo.norm_sq(z[i])))
        w[i] = z[i] + geo.sample_ball(model.n, 1, rng, radius=rad)[0]
    az, aw = model.orthonormal_values(z), model.orthonormal_values(w)
    fz = np.sum(coeffs * az.T, axis=1)
    fw = np.sum(coeffs * aw.T, axis=1)
    dist = np.sqrt(geo.norm_sq(z - w))
    scale = dist / (1.0 - geo.norm_sq(z)) * np.sqrt(model.norm_sq(z))
    diff = np.abs(fz - fw)
    ratios = np.divide(diff, scale, out=np.zeros(trial_count), where=scale > 0)
    bound = 4.0 * a_r * math.sqrt(model.n) / const.big_c
    series = RatioSeries("difference_bound", np.arange(trial_count), ratios, diff,
                         meta={"a_r": a_r, "big_c": const.big_c, "bound": bound, "r": r})
    series.verdict = "bounded" if series.sup <= bound else "violated"
    return series


# ---------------------------------------------------------------- weight comparability

def comparability_sweep(spec, center_levels, r, sample_count, seed, n=2):
    """``max/min`` of ``omega`` over ``D(a, r)`` for centers ``a = level * e_1``."""
    params, ratios = [], []
    for i, rho in enumerate(center_levels):
        a = np.zeros(n, dtype=complex)
        a[0] = rho
        hi, lo = wt.comparability_ratio(spec, a, r, sample_count, seed + i)
        params.append(rho)
        ratios.append(hi / lo)
    series = RatioSeries("comparability", params, ratios, meta={"r": r})
    series.verdict = growth_verdict(ratios) if len(ratios) >= 3 else "bounded"
    return series


# ---------------------------------------------------------------- Hessian

@dataclass
class HessianCheck:
    z: np.ndarray
    t_decay: float
    m_matrix: np.ndarray
    m_inverse: np.ndarray
    identity_residual: float
    inverse_sum_residual: float
    finite_difference_error: float
    g_trace: float

    @property
    def c_t(self):
        return 1.0 / (self.t_decay * (1.0 - self.t_decay) ** 2)


def _phi(z, w, t):
    return t * math.log(abs(1.0 - complex(np.sum(z * np.conj(w)))) ** 2 / (1.0 - float(geo.norm_sq(z))))


_STENCIL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))   # fourth-order first derivative, / 12h


def wirtinger_hessian(f, z, h=1e-4):
    """
    ``d^2 f / dz_j d conj(z_k)`` of a real function by central differences.

    Each second partial is the product of two fourth-order central stencils,
    so the truncation error is ``O(h^4)`` and does not swamp the comparison
    near the sphere.
    """
    z = np.asarray(z, dtype=complex)
    n = len(z)
    basis = [np.eye(n)[j].astype(complex) for j in range(n)]
    dirs = basis + [1j * e for e in basis]          # x_1..x_n, y_1..y_n
    H = np.zeros((2 * n, 2 * n))
    for a in range(2 * n):
        for b in range(a, 2 * n):
            val = 0.0
            for i, ci in _STENCIL:
                for j, cj in _STENCIL:
                    val += ci * cj * f(z + i * h * dirs[a] + j * h * dirs[b])
            H[a, b] = H[b, a] = val / (144.0 * h * h)
    xx, yy = H[:n, :n], H[n:, n:]
    xy = H[:n, n:]                                   # d x_j d y_k
    return 0.25 * ((xx + yy) + 1j * (xy - xy.T))


def hessian_inverse_check(z, w, t_decay, h=1e-4):
    """
    Closed-form complex Hessian ``M`` of ``t log(|1-<z,w>|^2 / (1-|z|^2))``,
    its inverse, the rank-one inverse formula and a finite-difference check.
    """
    if not 0 < t_decay < 1:
        raise ValueError("t_decay must lie in (0, 1)")
    z, w = geo.as_points(z), geo.as_points(w)
    geo._require_interior(z, w)
    n = len(z)
    zz = float(geo.norm_sq(z))
    if 1.0 - math.sqrt(zz) <= 4 * h:
        raise ValueError(f"finite-difference stencil of step {h:g} leaves the ball at |z| = {math.sqrt(zz):.6f}")
    rho = 1.0 - zz
    I = np.eye(n)
    B = np.outer(np.conj(z), z)                      # (z^* z)_{jk} = conj(z_j) z_k
    M = t_decay / rho**2 * (rho * I + B)
    Minv = rho / t_decay * (I - B)
    identity_residual = float(np.max(np.abs(M @ Minv - I)))
    A = rho * I
    Ainv = I / rho
    g = float(np.trace(B @ Ainv).real)
    rhs = Ainv - (1.0 / (1.0 + g)) * Ainv @ B @ Ainv
    inverse_sum_residual = float(np.max(np.abs((A + B) @ rhs - I)))
    fd = wirtinger_hessian(lambda p: _phi(p, w, t_decay), z, h)
    fd_error = float(np.max(np.abs(fd - M)))
    return HessianCheck(z, t_decay, M, Minv, identity_residual, inverse_sum_residual, fd_error, g)


# ---------------------------------------------------------------- Forelli-Rudin

def forelli_rudin_integral(q_exp, t_exp, n, w_abs, rule):
    """
    ``int (1-|z|^2)^q / |1-<z,w>|^{2n+t} dv`` at ``|w| = w_abs``.

    With a :class:`ProductRule` the sphere average is exact and only the
    rule's radial nodes are used; a :class:`MonteCarloRule` integrates
    directly and returns a standard error.
    """
    c = (2 * n + t_exp) / 2.0
    if isinstance(rule, qd.ProductRule):
        x, xw = rule.radial
        vals = (1.0 - x) ** q_exp * qd.sphere_power_average(c, n, x * w_abs * w_abs)
        return float(np.sum(xw * vals)), 0.0
    w = np.zeros(n, dtype=complex)
    w[0] = w_abs
    f = lambda z: (1.0 - geo.norm_sq(z)) ** q_exp / np.abs(1.0 - geo.hermitian_inner(z, w)) ** (2 * c)
    value, err = qd.integrate_ball(f, rule)
    return float(np.real(value)), err


def forelli_rudin_slope(q_exp, t_exp, n, w_levels, rule):
    """
    Log-log slope of the Forelli-Rudin integral against ``1 - |w|^2``.

    Requires ``q > -1`` and ``2n + t > n + 1 + q`` (the integral then blows
    up at the sphere with power ``q - (n-1) - t``).  The slope is fitted over
    all levels.
    """
    if not q_exp > -1:
        raise ValidationError("q must exceed -1 for the integral to converge")
    if not 2 * n + t_exp > n + 1 + q_exp:
        raise ValidationError(
            f"exponents outside the blow-up range: need 2n + t > n + 1 + q, "
            f"got {2 * n + t_exp:g} <= {n + 1 + q_exp:g}")
    levels = np.asarray(w_levels, dtype=float)
    vals, errs = zip(*(forelli_rudin_integral(q_exp, t_exp, n, lv, rule) for lv in levels))
    series = RatioSeries("forelli_rudin", levels, vals, vals, errs,
                         meta={"q": q_exp, "t": t_exp, "predicted_slope": q_exp - (n - 1) - t_exp})
    series.meta["slope"] = loglog_slope(levels, vals, tail=len(levels))
    series.verdict = growth_verdict(vals)
    return series
