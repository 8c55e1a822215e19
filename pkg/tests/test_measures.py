import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bergman_lab import geometry as geo
from bergman_lab import measures as ms
from bergman_lab.errors import ValidationError


def test_total_mass_examples():
    assert ms.total_mass(ms.AtomicBall([[0, 0.5]], [2.0])) == 2.0
    assert ms.total_mass(ms.UniformBoundary(1.0)) == 1.0
    assert ms.total_mass(ms.RadialDensity(0.0, 2)) == pytest.approx(1.0)
    assert ms.total_mass(ms.ZERO) == 0.0


@pytest.mark.parametrize("n,beta", [(1, 0.5), (2, 1.0), (2, -0.5), (3, 2.0)])
def test_radial_density_mass_quadrature_oracle(n, beta):
    want, _ = integrate.quad(lambda x: n * x ** (n - 1) * (1 - x) ** beta, 0, 1)
    assert ms.total_mass(ms.RadialDensity(beta, n, 3.0)) == pytest.approx(3.0 * want, rel=1e-10)


def test_atomic_validation():
    with pytest.raises(ValidationError):
        ms.AtomicBall([[1.0, 0.0]], [1.0])
    with pytest.raises(ValidationError):
        ms.AtomicBall([[0.1, 0.0]], [-1.0])
    with pytest.raises(ValidationError):
        ms.AtomicBall([[0.1, 0.0], [0.2, 0]], [1.0])
    with pytest.raises(ValidationError):
        ms.AtomicBoundary([[0.9, 0.0]], [1.0])
    with pytest.raises(ValidationError):
        ms.RadialDensity(-1.0, 2)


def test_boundary_atoms_projected():
    b = ms.AtomicBoundary([[1 + 5e-13, 0.0]], [1.0])
    assert np.linalg.norm(b.points[0]) == pytest.approx(1.0, abs=1e-15)


def test_atomic_is_immutable():
    a = ms.AtomicBall([[0.1, 0.0]], [1.0])
    with pytest.raises(ValueError):
        a.masses[0] = 5.0


def test_ball_mass_atomic_examples():
    d0 = ms.AtomicBall([[0, 0]], [1.0])
    assert ms.ball_mass(d0, [0, 0], 0.01) == (1.0, 0.0)
    assert ms.ball_mass(d0, [0.9, 0], 0.1) == (0.0, 0.0)
    assert ms.ball_mass(ms.ZERO, [0, 0], 1.0) == (0.0, 0.0)


def test_ball_mass_radial_equals_volume():
    eta = ms.RadialDensity(0.0, 2)
    r = math.atanh(0.5)
    assert ms.ball_mass(eta, [0, 0], r)[0] == pytest.approx(0.0625, rel=1e-12)
    for c in ([0.5, 0], [0.3, 0.6j], [0.99, 0], [0.0, 0.999999]):
        want = geo.bergman_ball_volume(np.array(c, dtype=complex), 0.7)
        assert ms.ball_mass(eta, c, 0.7)[0] == pytest.approx(want, rel=1e-10)


def test_ball_mass_radial_montecarlo_agrees():
    eta = ms.RadialDensity(1.5, 2, 2.0)
    c = np.array([0.6, 0.3j])
    exact, _ = ms.ball_mass(eta, c, 0.6)
    est, se = ms.ball_mass(eta, c, 0.6, method="montecarlo", count=200_000, seed=4)
    assert abs(est - exact) < 4 * se


def test_ball_mass_direct_monte_carlo_oracle():
    # membership sampling of the density itself, independent of the pull-back
    eta = ms.RadialDensity(1.0, 2)
    c = np.array([0.5, 0.0])
    rng = np.random.default_rng(8)
    pts = geo.sample_ball(2, 400_000, rng)
    vals = np.where(geo.in_bergman_ball(c, 0.8, pts), 1 - geo.norm_sq(pts), 0.0)
    est, se = vals.mean(), vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(ms.ball_mass(eta, c, 0.8)[0] - est) < 4 * se


@settings(max_examples=40)
@given(st.floats(-0.9, 3.0), st.floats(0.0, 0.95), st.floats(0.05, 1.5), st.floats(0.05, 1.5))
def test_ball_mass_monotone_in_r(beta, rho, r1, r2):
    eta = ms.RadialDensity(beta, 2)
    lo, hi = sorted((r1, r2))
    c = [rho, 0.0]
    assert ms.ball_mass(eta, c, lo)[0] <= ms.ball_mass(eta, c, hi)[0] * (1 + 1e-12)


def test_ball_mass_tends_to_total():
    eta = ms.RadialDensity(0.5, 2)
    assert ms.ball_mass(eta, [0.1, 0], 12.0, order=200)[0] == pytest.approx(ms.total_mass(eta), rel=1e-3)


def test_ball_mass_atomic_additive():
    mu = ms.AtomicBall([[0, 0], [0.9, 0], [0, -0.9]], [1.0, 2.0, 4.0])
    parts = sum(ms.ball_mass(mu, c, 0.3)[0] for c in ([0, 0], [0.9, 0], [0, -0.9]))
    assert parts == ms.total_mass(mu)


def test_sample_examples():
    a = ms.sample(ms.AtomicBall([[0.1, 0.2j]], [3.0]), 10, 0)
    assert np.all(a == np.array([0.1, 0.2j]))
    count = 40_000
    u = ms.sample(ms.UniformBoundary(1.0, 2), count, 1)
    assert np.all(np.abs(u.mean(axis=0)) < 4 / math.sqrt(count))
    z = ms.sample(ms.RadialDensity(0.0, 2), count, 2)
    x = geo.norm_sq(z)
    assert abs(x.mean() - 2 / 3) < 4 * x.std(ddof=1) / math.sqrt(count)
    with pytest.raises(ValidationError):
        ms.sample(ms.ZERO, 1, 0)


def test_sample_reproducible():
    m = ms.RadialDensity(1.0, 3)
    assert np.array_equal(ms.sample(m, 50, 9), ms.sample(m, 50, 9))


def test_is_radial():
    assert ms.is_radial(ms.ZERO)
    assert ms.is_radial(ms.RadialDensity(0.0, 2))
    assert ms.is_radial(ms.AtomicBall([[0, 0]], [1.0]))
    assert not ms.is_radial(ms.AtomicBall([[0.1, 0]], [1.0]))
    assert not ms.is_radial(ms.AtomicBoundary([[1, 0]], [1.0]))


@pytest.mark.parametrize("m", [
    ms.ZERO,
    ms.AtomicBall([[0.3, 0.1j], [0, -0.2]], [1.0, 0.5]),
    ms.AtomicBoundary([[1j, 0]], [2.0]),
    ms.UniformBoundary(1.5, 2),
    ms.RadialDensity(0.25, 2, 3.0),
])
def test_json_roundtrip(m):
    back = ms.measure_from_json(ms.measure_to_json(m), 2)
    assert ms.measure_to_json(back) == ms.measure_to_json(m)


def test_json_errors():
    with pytest.raises(ValidationError):
        ms.measure_from_json({"type": "gaussian"}, 2)
    with pytest.raises(ValidationError):
        ms.measure_from_json({"atoms": []}, 2)
    bad = {"type": "atomic_ball", "atoms": [{"point": [[0.3, 0.0]], "mass": 1.0}]}
    with pytest.raises(ValidationError):
        ms.measure_from_json(bad, 2)
