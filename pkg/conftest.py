"""
Shared pytest fixtures.

Puts src on the import path the same way the scripts do.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent / "src"))

from geometry_factory import flat_cross, two_squares  # noqa: E402
from multipatch_topology import build_topology  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_square_surface():
    surface = two_squares()
    return surface, build_topology(surface)


@pytest.fixture
def cross_surface():
    surface = flat_cross()
    return surface, build_topology(surface)


@pytest.fixture(scope="session")
def lshape_case():
    from geometry_factory import make_case
    return make_case("lshape_2p")


@pytest.fixture(scope="session")
def hyperboloid_case():
    from geometry_factory import make_case
    return make_case("hyperboloid_6p_1")
