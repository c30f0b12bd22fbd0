"""Metric, density, and data-generation tests."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from bmreg.manifolds import Circle, Sphere, make_manifold
from bmreg.metrics import (
    PredictorDensity,
    QuadratureGrid,
    density_distance,
    dinf_distance,
    dq_distance,
    generate_dataset,
    knot_total_variation,
    l1_error,
    theorem_rate_sidelength,
)
from bmreg.paths import PiecewiseGeodesicPath


def _circle_path(knots):
    return PiecewiseGeodesicPath(Circle(), np.asarray(knots, dtype=float))


# ---------------------------------------------------------------- grids/densities


def test_quadrature_grid_weights_integrate_one():
    for nodes in [32, 33, 512]:
        grid = QuadratureGrid(nodes)
        assert_allclose(np.sum(grid.weights()), 1.0, rtol=0, atol=1e-12)
    with pytest.raises(ValueError):
        QuadratureGrid(31)


def test_uniform_density_basics():
    p = PredictorDensity.uniform()
    assert p.pdf(0.3) == 1.0
    assert p.weight(0.9) == 1.0
    rng = np.random.default_rng(0)
    draws = p.sample(10_000, rng)
    assert draws.min() >= 0.0 and draws.max() <= 1.0
    # exact inverse CDF: strong uniformity
    assert stats.kstest(draws, "uniform").pvalue > 1e-3


def test_density_must_integrate_to_one():
    with pytest.raises(ValueError):
        PredictorDensity([0.0, 1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        PredictorDensity([0.0, 1.0], [-1.0, 3.0])
    with pytest.raises(ValueError):
        PredictorDensity([0.1, 1.0], [1.0, 1.0])


def test_piecewise_linear_density_sampling_matches_cdf():
    # triangle density p(t) = 2t
    p = PredictorDensity.piecewise_linear([0.0, 1.0], [0.0, 2.0])
    rng = np.random.default_rng(5)
    draws = p.sample(20_000, rng)
    assert stats.kstest(draws, lambda x: x**2).pvalue > 1e-3


def test_density_threshold_restricts_weight():
    p = PredictorDensity.piecewise_linear([0.0, 1.0], [0.0, 2.0], threshold=1.0)
    assert p.weight(0.25) == 0.0  # pdf = 0.5 < 1
    assert p.weight(0.75) == 1.5
    assert p.pdf(0.25) == 0.5  # sampling pdf unrestricted


# ---------------------------------------------------------------- dq / dinf


def test_dq_frozen_linear_example():
    # f = 0, g(t) = t (angles): dist(f(t), g(t)) = t, so d_1 = 1/2 exactly
    # (trapezoid is exact on linear integrands) and d_2 = 1/sqrt(3)
    m = Circle()
    f = _circle_path([0.0, 0.0])
    g = lambda t: t
    assert_allclose(dq_distance(f, g, 1.0, PredictorDensity.uniform(), m), 0.5, rtol=0, atol=1e-12)
    assert_allclose(dq_distance(f, g, 2.0, PredictorDensity.uniform(), m), 1 / math.sqrt(3), rtol=0, atol=1e-5)


def test_dq_symmetric_and_zero_on_equal():
    m = Circle()
    rng = np.random.default_rng(3)
    f = _circle_path(rng.uniform(0, 2 * math.pi, 5))
    g = _circle_path(rng.uniform(0, 2 * math.pi, 7))
    assert dq_distance(f, g, 2.0, PredictorDensity.uniform(), m) == dq_distance(
        g, f, 2.0, PredictorDensity.uniform(), m
    )
    assert dq_distance(f, f.copy(), 2.0, PredictorDensity.uniform(), m) == 0.0
    with pytest.raises(ValueError):
        dq_distance(f, g, 0.5, PredictorDensity.uniform(), m)


def test_dq_monotone_in_order_and_below_dinf():
    m = Circle()
    rng = np.random.default_rng(11)
    uniform = PredictorDensity.uniform()
    for _ in range(20):
        f = _circle_path(rng.uniform(0, 2 * math.pi, rng.integers(2, 9)))
        g = _circle_path(rng.uniform(0, 2 * math.pi, rng.integers(2, 9)))
        d1 = dq_distance(f, g, 1.0, uniform, m)
        d2 = dq_distance(f, g, 2.0, uniform, m)
        d4 = dq_distance(f, g, 4.0, uniform, m)
        dinf = dinf_distance(f, g, m)
        assert d1 <= d2 + 1e-10
        assert d2 <= d4 + 1e-10
        assert d4 <= dinf + 1e-10


def test_dq_triangle_inequality():
    m = Circle()
    rng = np.random.default_rng(19)
    uniform = PredictorDensity.uniform()
    for _ in range(20):
        f, g, h = (_circle_path(rng.uniform(0, 2 * math.pi, 6)) for _ in range(3))
        assert dq_distance(f, h, 2.0, uniform, m) <= (
            dq_distance(f, g, 2.0, uniform, m) + dq_distance(g, h, 2.0, uniform, m) + 1e-10
        )


def test_dinf_includes_knot_times():
    # spike at a knot time (33/64) that no 32-node grid point hits
    m = Circle()
    K = 64
    knots = np.zeros(K + 1)
    knots[33] = 1.5
    f = PiecewiseGeodesicPath(m, knots)
    g = _circle_path([0.0, 0.0])
    assert_allclose(dinf_distance(f, g, m, QuadratureGrid(32)), 1.5, rtol=0, atol=1e-12)


def test_restricted_weight_zeroes_region_in_dq():
    m = Circle()
    # restriction keeps only t >= 0.5 where the triangle density exceeds 1
    p = PredictorDensity.piecewise_linear([0.0, 1.0], [0.0, 2.0], threshold=1.0)
    f = _circle_path([0.0, 0.0])
    g = _circle_path([1.0, 1.0])
    # d_1 = int_{1/2}^1 1 * 2t dt = 3/4
    assert_allclose(dq_distance(f, g, 1.0, p, m), 0.75, rtol=0, atol=1e-3)


def test_l1_error_is_d1():
    m = Circle()
    f = _circle_path([0.2, 0.2])
    g = _circle_path([0.7, 0.7])
    assert_allclose(l1_error(f, g, m), 0.5, rtol=0, atol=1e-12)


# ---------------------------------------------------------------- density distance


def test_density_distance_positive_and_dominated():
    m = Circle()
    rng = np.random.default_rng(23)
    uniform = PredictorDensity.uniform()
    grid = QuadratureGrid(128)
    sigma2 = 0.5
    # max kernel slope bounds dens_1 by C * vol * d_inf (Lipschitz argument)
    gaps = np.linspace(0, math.pi, 20_001)
    vals = m.heat_kernel_from(sigma2, 0.0, gaps)
    slope = float(np.max(np.abs(np.diff(vals) / np.diff(gaps))))
    bound_const = slope * m.volume
    for _ in range(10):
        f = _circle_path(rng.uniform(0, 2 * math.pi, 4))
        g = _circle_path(rng.uniform(0, 2 * math.pi, 4))
        d1 = dq_distance(f, g, 1.0, uniform, m, grid)
        dd = density_distance(f, g, 1.0, sigma2, uniform, m, grid)
        dinf = dinf_distance(f, g, m, grid)
        if d1 > 1e-6:
            assert dd > 0.0
        assert dd <= bound_const * dinf + 1e-9


def test_density_distance_zero_for_identical():
    m = Circle()
    f = _circle_path([0.3, 1.1, 2.0])
    assert density_distance(f, f.copy(), 1.0, 0.3, PredictorDensity.uniform(), m, QuadratureGrid(64)) == 0.0


# ---------------------------------------------------------------- rate rule / tv


def test_theorem_rate_sidelength_examples():
    assert theorem_rate_sidelength(100, 0.05) == (6, pytest.approx(1 / 6))
    assert theorem_rate_sidelength(2, 0.24) == (1, 1.0)
    assert theorem_rate_sidelength(50, 0.05) == (5, pytest.approx(0.2))
    assert theorem_rate_sidelength(800, 0.05)[0] == 14
    with pytest.raises(ValueError):
        theorem_rate_sidelength(1, 0.05)
    with pytest.raises(ValueError):
        theorem_rate_sidelength(100, 0.3)
    with pytest.raises(ValueError):
        theorem_rate_sidelength(100, 0.0)


def test_knot_total_variation():
    path = _circle_path([0.0, 0.5, 0.1])
    assert_allclose(knot_total_variation(path), 0.9, rtol=0, atol=1e-12)
    const = _circle_path([1.0, 1.0, 1.0])
    assert knot_total_variation(const) == 0.0


# ---------------------------------------------------------------- generation


def test_generate_dataset_deterministic_and_valid():
    m = Circle()
    f0 = lambda t: (t + 0.5) ** 2
    a = generate_dataset(f0, 50, 0.1, PredictorDensity.uniform(), m, np.random.default_rng(7))
    b = generate_dataset(f0, 50, 0.1, PredictorDensity.uniform(), m, np.random.default_rng(7))
    assert np.array_equal(a.ts, b.ts) and np.array_equal(a.points, b.points)
    assert a.n == 50
    assert a.manifold_kind == "circle"
    assert a.ts.min() >= 0.0 and a.ts.max() <= 1.0


def test_generate_dataset_noise_centered_on_f0():
    m = Circle()
    f0 = lambda t: 1.0
    data = generate_dataset(f0, 40_000, 0.1, PredictorDensity.uniform(), m, np.random.default_rng(3))
    gaps = np.angle(np.exp(1j * (data.points - 1.0)))
    assert abs(float(np.mean(gaps))) < 3 * math.sqrt(0.1 / 40_000) * 1.5


def test_generate_dataset_on_sphere():
    m = Sphere()
    north = np.array([0.0, 0.0, 1.0])
    data = generate_dataset(lambda t: north, 30, 0.2, PredictorDensity.uniform(), m, np.random.default_rng(1))
    assert data.points.shape == (30, 3)
    assert np.mean(data.points @ north) > 0.5


def test_generate_dataset_validation():
    m = Circle()
    with pytest.raises(ValueError):
        generate_dataset(lambda t: 0.0, 0, 0.1, PredictorDensity.uniform(), m, np.random.default_rng(0))
    with pytest.raises(ValueError):
        generate_dataset(lambda t: 0.0, 5, 0.0, PredictorDensity.uniform(), m, np.random.default_rng(0))
