import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_rotation
from shellgrowth import catalog
from shellgrowth.errors import DegenerateSurface
from shellgrowth.surface import (ParamSurface, curvature, direction_roots, fundamental_forms, jet,
                                 normal_curvature, principal_curvatures, quadratic_residual)

MODES = ("analytic", "dual", "fd")


@pytest.mark.parametrize("mode", MODES)
def test_cylinder_forms(mode):
    s = catalog.cylinder(4.0, np.pi, 4.0, mode)
    th = s.grid(9, 7, margin=1e-3)
    f = fundamental_forms(jet(s, th))
    tol = 1e-12 if mode != "fd" else 1e-6
    assert np.allclose(f.E, 16, atol=tol) and np.allclose(f.G, 1, atol=tol)
    assert np.max(np.abs(f.F)) < tol and np.max(np.abs(f.M)) < tol
    assert np.allclose(f.L, -4, atol=tol) and np.max(np.abs(f.N)) < tol
    c = curvature(f)
    assert np.allclose(c.kappa1, -0.25, atol=tol) and np.allclose(c.kappa2, 0, atol=tol)
    assert not c.umbilic.any()


def test_sphere_is_umbilic_everywhere():
    s = catalog.get("sweet_melon").target()
    c = curvature(fundamental_forms(jet(s, s.grid(8, 8, margin=0.01))))
    assert np.allclose(np.abs(c.H), 0.25) and np.allclose(c.K, 1 / 16)
    assert c.umbilic.all()


def test_plane_is_flat():
    s = ParamSurface.from_expressions(["t1 + t2", "t1 - t2", "3"], [[0, 1], [0, 1]])
    c = curvature(fundamental_forms(jet(s, s.grid(5, 5))))
    assert np.max(np.abs(c.H)) == 0 and np.max(np.abs(c.K)) == 0


def test_degenerate_parametrization_raises():
    s = ParamSurface.from_expressions(["t1*cos(t2)", "t1*sin(t2)", "0"], [[0, 1], [0, 1]])
    with pytest.raises(DegenerateSurface):
        jet(s, np.array([[0.0, 0.5]]))


@pytest.mark.parametrize("name", catalog.names())
def test_modes_agree_on_catalog(name):
    e = catalog.get(name)
    th = e.sample_grid(6, 6)
    base = fundamental_forms(jet(e.target("analytic"), th))
    for mode, tol in (("dual", 1e-10), ("fd", 1e-5)):
        f = fundamental_forms(jet(e.target(mode), th))
        scale = max(1.0, *(float(np.max(np.abs(getattr(base, k)))) for k in "EGLMN"))
        for k in ("E", "F", "G", "L", "M", "N"):
            assert np.max(np.abs(getattr(f, k) - getattr(base, k))) < tol * scale, (mode, k)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.05, 3.9))
def test_principal_directions_solve_characteristic_equation(t1, t2):
    s = catalog.get("spiral_cactus").target()
    f = fundamental_forms(jet(s, np.array([[t1, t2]])))
    xa, xb, _ = direction_roots(f)
    for xi in (xa, xb):
        assert np.max(np.abs(quadratic_residual(f, xi))) < 1e-10
    k1, k2, H, K = principal_curvatures(f)
    kn = sorted([normal_curvature(f, xa)[0], normal_curvature(f, xb)[0]])
    assert kn == pytest.approx([k1[0], k2[0]], abs=1e-10)
    assert H[0] == pytest.approx((k1[0] + k2[0]) / 2) and K[0] == pytest.approx(k1[0] * k2[0])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_curvatures_invariant_under_rigid_motion(seed):
    rng = np.random.default_rng(seed)
    s = catalog.get("pumpkin_tendril").target()
    moved = s.transformed(random_rotation(rng), rng.normal(size=3) * 10)
    th = s.grid(5, 5, margin=0.01)
    a, b = curvature(fundamental_forms(jet(s, th))), curvature(fundamental_forms(jet(moved, th)))
    assert np.max(np.abs(a.kappa1 - b.kappa1)) < 1e-12 and np.max(np.abs(a.kappa2 - b.kappa2)) < 1e-12
