#!/usr/bin/env python3
"""
Gluing Data Test

Gluing functions of AS-G1 interfaces, their verification report and the
linearization of surfaces that are G1 but not AS-G1.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from errors import DegenerateGluingError, NotASG1Error  # noqa: E402
from geometry_factory import hyperboloid_layout_2, hyperboloid_surface, lshape_holes_layout, planar_surface, two_squares  # noqa: E402
from gluing_data import (  # noqa: E402
    as_g1_linearize,
    compute_all_gluing,
    compute_gluing,
    fit_edge_gluing,
    gluing_residual,
    split_beta,
    transversal_maps,
    verify_as_g1,
)
from gluing_data.models import linear, quadratic_bernstein  # noqa: E402
from multipatch_topology import MultiPatchSurface, build_topology, standard_form_edge  # noqa: E402
from spline_core import TensorSplinePatch, refine  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _bent_squares() -> MultiPatchSurface:
    """Two planar squares whose control net is moved next to the interface."""
    patches = [refine(patch, insert_knots=1, elevate_degree=1) for patch in two_squares().patches]
    control = patches[0].control.copy()
    control[-2, 1, :2] += (0.05, 0.1)
    patches[0] = TensorSplinePatch(patches[0].space, control)
    return MultiPatchSurface(patches)


def test_two_squares_have_trivial_gluing(two_square_surface):
    surface, topology = two_square_surface
    data = compute_all_gluing(surface, topology)
    assert len(data) == len(topology.edges)
    interface = data[topology.interfaces[0].index]
    assert interface.is_trivial
    assert interface.alpha_positive()
    assert interface.residual < 1e-12
    assert all(d.is_trivial for d in data)
    logger.info("✓ Trivial gluing on two squares")


def test_gluing_identity_holds_on_hyperboloid():
    surface = hyperboloid_surface(hyperboloid_layout_2())
    topology = build_topology(surface)
    for edge in topology.interfaces:
        data = compute_gluing(surface, topology, edge)
        P1, P2 = standard_form_edge(topology, edge).patches(surface)
        assert gluing_residual(P1, P2, data) <= 1e-10
        assert data.alpha_positive()
        assert data.edge == edge.index


def test_threaded_gluing_matches_serial(cross_surface):
    surface, topology = cross_surface
    serial = compute_all_gluing(surface, topology)
    threaded = compute_all_gluing(surface, topology, workers=3)
    xs = np.linspace(0.0, 1.0, 5)
    for a, b in zip(serial, threaded):
        np.testing.assert_allclose(a.alpha1(xs), b.alpha1(xs))
        np.testing.assert_allclose(a.beta2(xs), b.beta2(xs))


def test_report_on_as_g1_surface(cross_surface):
    surface, topology = cross_surface
    report = verify_as_g1(surface, topology)
    assert report.passed
    assert len(report.edges) == len(topology.edges)
    assert report.max_residual < 1e-10
    assert sum(edge.interface for edge in report.edges) == 4


def test_perturbed_interface_is_not_as_g1():
    surface = _bent_squares()
    topology = build_topology(surface)
    report = verify_as_g1(surface, topology)
    assert not report.passed
    assert [entry.edge for entry in report.failed] == [topology.interfaces[0].index]
    with pytest.raises(NotASG1Error) as info:
        compute_gluing(surface, topology, topology.interfaces[0])
    assert info.value.residual > 1e-10
    logger.info(f"✓ Perturbed interface rejected (residual {report.max_residual:.2e})")


def test_linearize_repairs_planar_interface():
    surface = _bent_squares()
    topology = build_topology(surface)
    repaired = as_g1_linearize(surface, topology)
    assert verify_as_g1(repaired, topology).passed
    # input untouched
    assert not verify_as_g1(surface, topology).passed
    np.testing.assert_allclose(repaired[0].control[..., 2], 0.0, atol=1e-14)


def test_linearize_keeps_as_g1_surface(cross_surface):
    surface, topology = cross_surface
    repaired = as_g1_linearize(surface, topology)
    for a, b in zip(surface.patches, repaired.patches):
        np.testing.assert_array_equal(a.control, b.control)


def test_split_beta_minimum_norm():
    one = linear(1.0, 1.0)
    beta1, beta2 = split_beta(one, one, linear(1.0, 3.0))
    xs = np.linspace(0.0, 1.0, 5)
    np.testing.assert_allclose(beta1(xs), beta2(xs), atol=1e-12)
    np.testing.assert_allclose(beta1(xs) + beta2(xs), 1.0 + 2.0 * xs, atol=1e-12)


def test_split_beta_rejects_quadratic_with_constant_alphas():
    one = linear(1.0, 1.0)
    with pytest.raises(DegenerateGluingError):
        split_beta(one, one, quadratic_bernstein(0.0, 1.0, 0.0))


def test_split_beta_with_linear_alphas():
    alpha1, alpha2 = linear(1.0, 2.0), linear(2.0, 1.0)
    beta1, beta2 = linear(0.3, -0.2), linear(0.1, 0.4)
    beta = alpha1 * beta2 + alpha2 * beta1
    s1, s2 = split_beta(alpha1, alpha2, beta)
    xs = np.linspace(0.0, 1.0, 9)
    np.testing.assert_allclose((alpha1 * s2 + alpha2 * s1)(xs), beta(xs), atol=1e-12)


def test_split_beta_accepts_round_off_beta():
    one = linear(1.0, 1.0)
    beta1, beta2 = split_beta(one, one, quadratic_bernstein(1e-17, -2e-17, 3e-17))
    assert max(abs(beta1.coef).max(), abs(beta2.coef).max()) < 1e-15


def test_two_squares_interface_glues_with_round_off_beta(two_square_surface):
    surface, topology = two_square_surface
    edge = topology.interfaces[0]
    data = compute_gluing(surface, topology, edge)
    for t in (0.0, 0.5, 1.0):
        assert data.alpha1(t) == pytest.approx(data.alpha2(t), rel=1e-12)
        assert abs(data.beta1(t)) + abs(data.beta2(t)) < 1e-12
    assert verify_as_g1(surface, topology).passed


def test_lshape_with_holes_is_as_g1():
    surface = planar_surface(lshape_holes_layout(255.0, 30.0, 55.0, 10.0))
    topology = build_topology(surface)
    report = verify_as_g1(surface, topology, 1e-10)
    assert report.passed
    assert len(topology.interfaces) > 20
    logger.info(f"✓ L-shape with holes: {len(topology.interfaces)} interfaces, residual {report.max_residual:.2e}")


def test_linearize_moves_first_row_points_least():
    """The repaired first rows satisfy the normal equations of the displacement norm."""
    surface = _bent_squares()
    topology = build_topology(surface)
    form = standard_form_edge(topology, topology.interfaces[0])
    P1, P2 = form.patches(surface)
    R1, R2 = form.patches(as_g1_linearize(surface, topology))

    L1, L2, _, _ = transversal_maps(P1, P2, fit_edge_gluing(P1, P2))
    space = P1.space.univariate
    step = space.h / space.p
    dX = (R1.control[1] - P1.control[1])[1:-1] / step
    dY = (R2.control[:, 1] - P2.control[:, 1])[1:-1] / step
    moved = max(np.abs(dX).max(), np.abs(dY).max())
    assert moved > 1e-6

    M = np.vstack([L1[1:-1, 1:-1], -L2[1:-1, 1:-1]])
    gradient = M.T @ np.vstack([dX, dY])
    assert np.abs(gradient).max() <= 1e-9 * np.abs(M).max() * moved
    # only first-row points move
    np.testing.assert_array_equal(R1.control[2:], P1.control[2:])
    np.testing.assert_array_equal(R2.control[:, 2:], P2.control[:, 2:])
    logger.info(f"✓ Linearization displacement is stationary (moved {moved * step:.3e})")
