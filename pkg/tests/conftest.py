import functools

import numpy as np
import pytest

from shellgrowth import catalog
from shellgrowth.growth import design


@functools.lru_cache(maxsize=None)
def catalog_design(name, mode="analytic"):
    e = catalog.get(name)
    return design(e.reference(mode), e.target(mode), e.net(mode), h=e.h)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
