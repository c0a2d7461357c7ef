#!/usr/bin/env python3
"""
Geometry Factory Test

Exact polynomial composition, planar layouts and the benchmark cases.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from errors import ParameterError  # noqa: E402
from geometry_factory import (  # noqa: E402
    CASES,
    PolynomialSurface,
    bilinear_patch,
    compose_surface,
    composed_space,
    embed_planar,
    hyperboloid_layout_1,
    hyperboloid_layout_2,
    lshape_holes_layout,
    make_case,
)
from gluing_data import verify_as_g1  # noqa: E402
from multipatch_topology import Side  # noqa: E402
from spline_core import UnivariateSplineSpace, eval_patch  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

QUAD = ((-0.3, -0.4), (0.35, -0.25), (0.3, 0.45), (-0.4, 0.2))


def test_composition_is_exact(rng):
    planar = bilinear_patch(QUAD)
    surface = PolynomialSurface.hyperbolic()
    lifted = compose_surface(surface, planar)
    assert lifted.space.univariate.p == 2
    for xi in rng.random((15, 2)):
        np.testing.assert_allclose(
            eval_patch(lifted, xi).point,
            surface(eval_patch(planar, xi).point),
            atol=1e-13,
        )
    logger.info("✓ Composition reproduces F(q)")


def test_composed_space():
    assert composed_space(UnivariateSplineSpace(1, 0, 1), 2) == UnivariateSplineSpace(2, 1, 1)
    assert composed_space(UnivariateSplineSpace(2, 1, 4), 2) == UnivariateSplineSpace(4, 1, 4)
    assert composed_space(UnivariateSplineSpace(2, 1, 4), 1) == UnivariateSplineSpace(2, 1, 4)


def test_composition_limits():
    cubic = np.zeros((3, 4, 4))
    cubic[2, 3, 0] = 1.0
    with pytest.raises(ParameterError):
        compose_surface(PolynomialSurface(cubic), bilinear_patch(QUAD))
    with pytest.raises(ParameterError):
        compose_surface(PolynomialSurface.hyperbolic(), embed_planar(bilinear_patch(QUAD)))
    with pytest.raises(ParameterError):
        PolynomialSurface(np.zeros((2, 3, 3)))


def test_polynomial_surface_evaluation():
    surface = PolynomialSurface.hyperbolic()
    assert surface.degree == 2
    assert PolynomialSurface.embedding().degree == 1
    np.testing.assert_allclose(surface(np.array([0.5, -0.25])), [0.5, -0.25, 0.1875])


def test_layouts_cover_the_square():
    for quads in (hyperboloid_layout_1(), hyperboloid_layout_2()):
        assert len(quads) == 6
        area = 0.0
        for a, b, c, d in (np.asarray(q) for q in quads):
            # shoelace, counterclockwise quads have positive area
            polygon = np.array([a, b, c, d])
            x, y = polygon[:, 0], polygon[:, 1]
            signed = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
            assert signed > 0.0
            area += signed
        assert area == pytest.approx(1.0)


def test_lshape_holes_layout():
    quads = lshape_holes_layout()
    assert len(quads) == 25
    area = sum((q[1][0] - q[0][0]) * (q[3][1] - q[0][1]) for q in quads)
    assert area == pytest.approx(2 * 225.0 * 30.0 + 30.0 ** 2 - 2 * 55.0 * 10.0)


@pytest.mark.parametrize("name", sorted(CASES))
def test_every_case_is_as_g1(name):
    case = make_case(name)
    report = verify_as_g1(case.surface, case.topology)
    assert report.passed, report
    assert case.bcs.edges
    assert case.monitor.name in ("A", "tip")
    np.testing.assert_allclose(eval_patch(case.surface[case.monitor.patch], case.monitor.xi).point, case.monitor.point)


def test_hyperboloid_cases(hyperboloid_case):
    case = hyperboloid_case
    assert len(case.surface) == 6
    assert sorted(v.valence for v in case.topology.inner_vertices) == [3, 3, 4]
    assert case.analysis == "linear"
    assert case.stress_scale == 1e-6
    assert case.reference == "single_patch_hyperboloid"
    np.testing.assert_allclose(case.monitor.point, (0.5, 0.0, 0.25), atol=1e-8)
    assert case.loads.surface_load == pytest.approx((0.0, 0.0, -80.0))

    second = make_case("hyperboloid_6p_2")
    assert sorted(v.valence for v in second.topology.inner_vertices) == [3, 3, 3, 4]
    assert any(v.valence == 2 for v in second.topology.boundary_vertices)
    logger.info(f"✓ {case.summary()}")


def test_hole_case_monitor_on_the_hole():
    case = make_case("hyperboloid_hole_4p")
    assert len(case.surface) == 4
    assert not case.topology.inner_vertices
    x, y, z = case.monitor.point
    assert (x, y) == pytest.approx((0.15, 0.0), abs=5e-3)
    assert z == pytest.approx(x * x - y * y, abs=1e-10)


def test_lshape_cases(lshape_case):
    case = lshape_case
    assert len(case.surface) == 2
    assert len(case.topology.interfaces) == 1
    assert case.analysis == "arclength"
    assert [(e.patch, e.side) for e in case.bcs.edges] == [(0, Side.WEST)]
    np.testing.assert_allclose(case.monitor.point, (240.0, 0.0, 0.0), atol=1e-6)
    (load,) = case.loads.point_loads
    assert load.force == pytest.approx((1.0, 0.0, 1e-3))
    assert load.scaled

    holes = make_case("lshape_holes_25p", load_scale=2.0, perturbation_ratio=0.01)
    assert len(holes.surface) == 25
    assert len(holes.bcs.edges) == 3
    assert holes.loads.point_loads[0].force == pytest.approx((2.0, 0.0, 0.02))


def test_case_options():
    case = make_case("single_patch_hyperboloid", load_scale=2.0, penalty=1e3)
    assert case.loads.surface_load[2] == pytest.approx(-160.0)
    assert case.bcs.penalty == 1e3
    assert case.summary()['patches'] == 1
    with pytest.raises(ParameterError):
        make_case("cylinder")
