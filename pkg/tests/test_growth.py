import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import catalog_design
from shellgrowth import catalog
from shellgrowth.errors import NotCurvatureNet, ThicknessSingularity
from shellgrowth.growth import design, evaluate, growth_general, identity_residual
from shellgrowth.net import IdentityNet

REVOLUTION = ["sweet_melon", "morning_glory", "trachea", "apple"]


@pytest.mark.parametrize("name", REVOLUTION + ["identity_cylinder"])
def test_special_path_matches_closed_form_growth(name):
    e = catalog.get(name)
    d = catalog_design(name)
    assert d.path == "special"
    th = e.sample_grid(30, 30)
    gf, _, _ = d.sample(th)
    assert catalog.oracle_compare(e, gf, th) < 1e-10


@pytest.mark.parametrize("name", REVOLUTION)
def test_fd_mode_matches_closed_form_growth(name):
    e = catalog.get(name)
    d = catalog_design(name, "fd")
    th = e.sample_grid(30, 30)
    gf, _, _ = d.sample(th)
    assert catalog.oracle_compare(e, gf, th) < 1e-6


def test_identity_target_gives_identity_tensor():
    e = catalog.get("identity_cylinder")
    _, G, _ = catalog_design("identity_cylinder").sample(e.sample_grid(12, 12))
    for Z in (0.0, 0.01, 0.02):
        assert np.max(np.abs(G.components(Z) - np.eye(3))) < 1e-12


def test_special_tensor_is_frame_diagonal():
    e = catalog.get("trachea")
    _, G, _ = catalog_design("trachea").sample(e.sample_grid(10, 10))
    c = G.components(0.01)
    assert np.all(c[..., 0, 1] == 0) and np.all(c[..., 1, 0] == 0) and np.all(c[..., 2, 2] == 1)


def test_unit_frame_components_are_orthonormal_frame():
    e = catalog.get("apple")
    _, G, _ = catalog_design("apple").sample(e.sample_grid(6, 6))
    _, unit, frame = evaluate(G, 0.0)
    gram = frame @ np.swapaxes(frame, -1, -2)
    assert np.max(np.abs(gram - np.eye(3))) < 1e-12
    assert np.allclose(unit[..., 0, 0], G.G0[..., 0, 0])


def test_spiral_second_step_matches_cosh_forms(rng):
    e = catalog.get("spiral_cactus")
    d = catalog_design("spiral_cactus")
    lo, hi = e.domain[:, 0] + 1e-3, e.domain[:, 1] - 1e-3
    th = lo + (hi - lo) * rng.random((100, 2))
    _, _, maps = d.sample(th)
    eta = d.net.forward(th)
    for Z in (0.0, e.h, 2 * e.h):
        want = catalog.spiral_g1(eta, Z)
        got = maps.G1_components(Z)
        assert max(np.max(np.abs(a - b)) for a, b in zip(got, want)) < 1e-8


@pytest.mark.parametrize("name", ["spiral_cactus", "pumpkin_tendril"])
def test_two_step_composition_identity(name):
    e = catalog.get(name)
    d = catalog_design(name)
    assert d.path == "general"
    _, G, maps = d.sample(e.sample_grid(20, 20))
    assert identity_residual(maps, G, (0.0, e.h, 2 * e.h)) < 1e-8


def test_taylor_and_exact_tensor_differ_at_second_order():
    e = catalog.get("spiral_cactus")
    _, G, _ = catalog_design("spiral_cactus").sample(e.sample_grid(8, 8))
    gaps = [np.max(np.abs(G.exact(Z) - G.taylor(Z))) for Z in (0.02, 0.01)]
    assert gaps[0] / gaps[1] == pytest.approx(4.0, rel=0.05)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.01, 3.1), st.floats(0.01, 3.99), st.floats(0.0, 0.02))
def test_growth_determinant_positive(t1, t2, Z):
    _, G, _ = catalog_design("spiral_cactus").sample(np.array([[t1, t2]]))
    assert np.linalg.det(G.components(Z))[0] > 0


def test_wrong_net_is_rejected():
    e = catalog.get("spiral_cactus")
    d = design(e.reference(), e.target(), IdentityNet(e.domain), h=e.h)
    with pytest.raises(NotCurvatureNet):
        d.sample(e.sample_grid(5, 5))


def test_shell_thicker_than_reference_radius_is_rejected():
    e = catalog.get("apple")
    d = design(e.reference(), e.target(), h=2.5)
    with pytest.raises(ThicknessSingularity):
        d.sample(e.sample_grid(5, 5))
