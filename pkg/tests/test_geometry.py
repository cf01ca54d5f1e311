import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shrinkerlab.geometry import (
    EinsteinFactor,
    RigidShrinker,
    coarea_check,
    loglog_slope,
    rho_to_t,
    richardson_derivative,
    sphere_area,
    t_to_rho,
)

MODELS = [RigidShrinker.gaussian(k) for k in (1, 2, 3, 4)] + [
    RigidShrinker.cylinder(m, k) for m in (2, 3, 5) for k in (1, 2, 3)
]
model_st = st.sampled_from(MODELS)


def test_factor_construction_rules():
    with pytest.raises(ValueError):
        EinsteinFactor(1, 1.0)
    with pytest.raises(ValueError):
        EinsteinFactor.sphere(1)
    with pytest.raises(ValueError):
        EinsteinFactor(2, -1.0)
    with pytest.raises(ValueError):
        EinsteinFactor(2, 1.0, (0.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        EinsteinFactor(2, 1.0, (0.5,))
    with pytest.raises(ValueError):
        RigidShrinker.gaussian(0)


def test_round_sphere_factor():
    s2 = EinsteinFactor.sphere(2)
    assert s2.radius == pytest.approx(math.sqrt(2))
    assert s2.volume == pytest.approx(8 * math.pi, rel=1e-14)
    # mu_l = l (l + m - 1) / (2 (m - 1)); the first one is m / radius^2
    assert s2.eigenvalues[:4] == pytest.approx((0.0, 1.0, 3.0, 6.0))
    for m in (2, 3, 6):
        f = EinsteinFactor.sphere(m)
        assert f.eigenvalues[1] == pytest.approx(m / f.radius**2)


@given(st.sampled_from([0, 2, 3, 4, 5, 6, 7, 8, 9, 10]), st.integers(min_value=1, max_value=6))
def test_scalar_curvature_never_one_half(m, k):
    model = RigidShrinker.gaussian(k) if m == 0 else RigidShrinker.cylinder(m, k)
    assert model.R_exact != Fraction(1, 2)
    assert model.R == m / 2
    assert model.n == m + k
    assert model.beta == model.n / 2 - model.R


@given(model_st, st.integers(min_value=0, max_value=2**31))
def test_potential_identities(model, seed):
    y = np.random.default_rng(seed).normal(scale=3.0, size=(50, model.k))
    f = model.potential(y)
    g = model.grad_potential(y)
    assert np.allclose(np.sum(g * g, axis=1), f, rtol=1e-14, atol=0)
    # finite-difference Laplacian of the quadratic potential is exact up to roundoff
    h = 1e-2
    lap = sum((model.potential(y + h * e) - 2 * f + model.potential(y - h * e)) / h**2 for e in np.eye(model.k))
    assert np.allclose(lap, model.laplacian_potential(), atol=1e-8)
    assert model.laplacian_potential() == model.k / 2


def test_potential_shape_check():
    with pytest.raises(ValueError):
        RigidShrinker.gaussian(3).potential(np.zeros(2))


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.descriptor)
def test_volume_power_law(model):
    t = np.geomspace(1e-3, 1e3, 13)
    v = [model.sublevel_volume(s) for s in t]
    assert loglog_slope(t, v) == pytest.approx(model.n / 2 - model.R, abs=1e-9)


@given(model_st, st.lists(st.floats(min_value=1e-4, max_value=1e4), min_size=2, max_size=12, unique=True))
def test_volume_slope_on_any_grid(model, pts):
    t = np.sort(np.array(pts))
    if t[-1] / t[0] < 1.01:
        t = np.array([t[0], 2 * t[0]])
    v = [model.sublevel_volume(s) for s in t]
    assert loglog_slope(t, v) == pytest.approx(model.beta, abs=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.descriptor)
def test_boundary_area_is_coarea_derivative(model):
    for t in np.geomspace(1e-2, 1e2, 9):
        dv = richardson_derivative(model.sublevel_volume, t, 1e-3 * t)
        assert model.boundary_area(t) == pytest.approx(math.sqrt(t) * dv, rel=1e-6)


def test_sublevel_rejects_nonpositive():
    g = RigidShrinker.gaussian(2)
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            g.sublevel_volume(bad)
        with pytest.raises(ValueError):
            g.boundary_area(bad)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_rho_t_roundtrip(t):
    assert float(rho_to_t(t_to_rho(t))) == pytest.approx(t, rel=1e-14)


def test_rho_volume_matches_t_volume():
    cyl = RigidShrinker.cylinder(2, 1)
    assert cyl.rho_volume(2.0) == pytest.approx(cyl.sublevel_volume(1.0))
    assert cyl.volume_constant == pytest.approx(cyl.sublevel_volume(1.0))


def test_sphere_area_values():
    assert sphere_area(0) == pytest.approx(2.0)
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2, 2.0) == pytest.approx(16 * math.pi)


@pytest.mark.parametrize("model", MODELS, ids=lambda m: m.descriptor)
def test_coarea_entry(model):
    entry = coarea_check(model, np.geomspace(1e-2, 1e2, 10))
    assert entry.passed
    assert entry.details["rho_slope"] == pytest.approx(model.n - 2 * model.R, abs=1e-9)


@pytest.mark.parametrize("grid", [[1.0], [1.0, 1.0], [2.0, 1.0], [-1.0, 1.0]])
def test_coarea_rejects_bad_grid(grid):
    with pytest.raises(ValueError):
        coarea_check(RigidShrinker.gaussian(3), grid)
