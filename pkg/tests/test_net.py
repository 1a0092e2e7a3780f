import functools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shellgrowth import catalog
from shellgrowth.errors import OrientationError, UmbilicEncountered
from shellgrowth.growth import eta_forms
from shellgrowth.net import (IdentityNet, build_net_closed_form, build_net_numeric, degenerate_net,
                             metric_orthogonality, order_families, principal_angles)
from shellgrowth.surface import fundamental_forms, jet

SPIRAL = catalog.get("spiral_cactus")


@functools.lru_cache(maxsize=None)
def numeric_net(name, n):
    return build_net_numeric(catalog.get(name).target(), (n, n))


def test_order_families_prefers_direction_nearest_first_axis():
    x1, x2 = order_families(np.array([1.2, 0.3, np.pi / 4]), np.array([0.3 - np.pi / 2, 1.2, -np.pi / 4]))
    assert x1 == pytest.approx([1.2, 0.3, np.pi / 4])
    assert np.all(x2 > x1) and np.all(x2 < x1 + np.pi)


def test_order_families_tie_takes_counterclockwise():
    x1, _ = order_families(np.array([-np.pi / 4]), np.array([np.pi / 4]))
    assert x1[0] == pytest.approx(np.pi / 4)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.02, 3.1), st.floats(0.02, 3.98))
def test_spiral_principal_directions_are_metric_orthogonal(t1, t2):
    f = fundamental_forms(jet(SPIRAL.target(), np.array([[t1, t2]])))
    pa = principal_angles(f)
    assert metric_orthogonality(f, pa.xi1, pa.xi2)[0] < 1e-10
    assert -np.pi / 2 < pa.xi1[0] <= np.pi / 2 and pa.xi1[0] < pa.xi2[0] < pa.xi1[0] + np.pi


def test_umbilic_raises_with_location():
    f = fundamental_forms(jet(catalog.get("sweet_melon").target(), np.array([[0.5, 1.0]])))
    with pytest.raises(UmbilicEncountered) as info:
        principal_angles(f, points=np.array([[0.5, 1.0]]))
    assert np.allclose(info.value.location, [0.5, 1.0])


def test_closed_form_spiral_net_diagonalizes_both_forms():
    net = SPIRAL.net()
    th = SPIRAL.sample_grid(20, 20)
    f = eta_forms(jet(SPIRAL.target(), th), np.linalg.inv(net.jac(th)))
    assert np.max(np.abs(f.F)) < 1e-12 and np.max(np.abs(f.M)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, np.pi), st.floats(0.0, 4.0))
def test_closed_form_round_trip(t1, t2):
    net = SPIRAL.net()
    th = np.array([t1, t2])
    assert np.max(np.abs(net.inverse(net.forward(th)) - th)) < 1e-12


def test_reversed_net_is_rejected():
    with pytest.raises(OrientationError):
        build_net_closed_form(("t2", "t1"), ("e2", "e1"), SPIRAL.domain)


def test_numeric_net_matches_closed_form_on_spiral():
    nn, cf = numeric_net("spiral_cactus", 128), SPIRAL.net()
    th = SPIRAL.sample_grid(40, 40)
    assert np.max(np.abs(nn.forward(th) - cf.forward(th))) < 5e-4
    assert np.max(np.abs(nn.jac(th) - cf.jac(th))) < 5e-3


def test_numeric_net_round_trip():
    nn = numeric_net("spiral_cactus", 64)
    th = SPIRAL.sample_grid(15, 15)
    assert np.max(np.abs(nn.inverse(nn.forward(th)) - th)) < 1e-10


def test_tendril_net_lines_are_orthogonal_and_conjugate():
    e = catalog.get("pumpkin_tendril")
    nn = numeric_net("pumpkin_tendril", 128)
    th = e.sample_grid(20, 20)
    f = eta_forms(jet(e.target(), th), np.linalg.inv(nn.jac(th)))
    assert np.max(np.abs(f.F) / np.sqrt(f.E * f.G)) < 1e-4
    assert np.max(np.abs(f.M) / np.sqrt(f.E * f.G)) < 1e-4


@pytest.mark.parametrize("name", ["sweet_melon", "trachea", "apple", "identity_cylinder", "morning_glory"])
def test_revolution_surfaces_take_identity_fast_path(name):
    s = catalog.get(name).target()
    assert degenerate_net(s)
    assert isinstance(build_net_numeric(s, (16, 16)), IdentityNet)


def test_spiral_is_not_degenerate():
    assert not degenerate_net(SPIRAL.target())
