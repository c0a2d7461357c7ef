#!/usr/bin/env python3
"""
Spline Core Test

Spline spaces, basis evaluation, M functions, refinement and Bezier
extraction.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from errors import DomainError, ParameterError  # noqa: E402
from spline_core import (  # noqa: E402
    MFamily,
    TensorSplinePatch,
    TensorSplineSpace,
    UnivariateSplineSpace,
    bernstein,
    collocation_matrix,
    compute_bezier_extraction_1d,
    element_rules,
    eval_basis,
    eval_patch,
    greville_abscissae,
    m_function,
    prolongation,
    refine,
)

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def test_dimensions():
    """n, n0 and n1 follow the closed-form counts."""
    space = UnivariateSplineSpace(3, 1, 4)
    assert space.dimension == 10
    assert space.n0 == 7
    assert space.n1 == 6
    assert space.raise_regularity().dimension == space.n0
    assert space.lower_degree().dimension == space.n1

    space = UnivariateSplineSpace(4, 2, 8)
    assert space.dimension == 4 + 7 * 2 + 1
    assert len(space.knots) == space.dimension + space.p + 1
    logger.info("✓ Space dimensions")


def test_knot_vector_layout():
    space = UnivariateSplineSpace(3, 1, 2)
    np.testing.assert_allclose(space.knots, [0, 0, 0, 0, 0.5, 0.5, 1, 1, 1, 1])


@pytest.mark.parametrize("p, r, k", [(3, 1, 4), (4, 2, 3), (2, 1, 5), (5, 3, 1), (3, -1, 2)])
def test_from_knots_recovers_parameters(p, r, k):
    space = UnivariateSplineSpace(p, r, k)
    recovered = UnivariateSplineSpace.from_knots(space.knots)
    if k == 1:
        assert (recovered.p, recovered.k) == (p, 1)
    else:
        assert recovered == space


def test_from_knots_rejects_nonuniform():
    with pytest.raises(ParameterError):
        UnivariateSplineSpace.from_knots([0, 0, 0, 0, 0.3, 1, 1, 1, 1])
    with pytest.raises(ParameterError):
        UnivariateSplineSpace.from_knots([0, 0, 0, 0, 0.25, 0.5, 0.5, 1, 1, 1, 1])
    with pytest.raises(ParameterError):
        UnivariateSplineSpace.from_knots([0, 0, 0, 0.5, 1, 1, 1, 1])


def test_invalid_parameters():
    with pytest.raises(ParameterError):
        UnivariateSplineSpace(3, 3, 4)
    with pytest.raises(ParameterError):
        UnivariateSplineSpace(3, 1, 0)
    with pytest.raises(ParameterError):
        UnivariateSplineSpace(0, -1, 1)


def test_partition_of_unity(rng):
    space = UnivariateSplineSpace(4, 2, 5)
    for xi in np.concatenate([rng.random(20), [0.0, 0.2, 1.0]]):
        first, table = eval_basis(space, xi, 2)
        assert table.shape == (3, space.p + 1)
        assert 0 <= first <= space.dimension - space.p - 1
        assert abs(table[0].sum() - 1.0) < 1e-13
        assert abs(table[1].sum()) < 1e-10
        assert abs(table[2].sum()) < 1e-8
        assert np.all(table[0] >= -1e-14)
    logger.info("✓ Partition of unity")


def test_basis_derivative_matches_difference_quotient():
    space = UnivariateSplineSpace(3, 1, 3)
    xi, step = 0.41, 1e-6
    first, table = eval_basis(space, xi, 1)
    _, plus = eval_basis(space, xi + step)
    _, minus = eval_basis(space, xi - step)
    np.testing.assert_allclose(table[1], (plus[0] - minus[0]) / (2 * step), atol=1e-6)


def test_parameter_outside_domain():
    space = UnivariateSplineSpace(3, 1, 2)
    with pytest.raises(DomainError):
        eval_basis(space, 1.5)
    with pytest.raises(DomainError):
        eval_basis(space, -0.1)
    with pytest.raises(DomainError):
        eval_basis(space, float("nan"))


def test_greville_collocation_is_invertible():
    space = UnivariateSplineSpace(4, 2, 4)
    g = greville_abscissae(space)
    assert g[0] == 0.0 and g[-1] == 1.0
    assert np.all(np.diff(g) > 0)
    matrix = collocation_matrix(space, g)
    assert np.linalg.matrix_rank(matrix) == space.dimension


@pytest.mark.parametrize("p, r", [(3, 1), (4, 2), (4, 1), (5, 2)])
def test_m_function_boundary_values(p, r):
    """Traces at 0 of the boundary functions used by the edge and vertex bases."""
    space = UnivariateSplineSpace(p, r, 4)
    for family, slope in ((MFamily.BASE, 1.0), (MFamily.LOWER_DEGREE, (p - 1) / p)):
        assert m_function(space, family, 0, 0.0) == pytest.approx(1.0)
        assert m_function(space, family, 0, 0.0, 1) == pytest.approx(0.0, abs=1e-10)
        assert m_function(space, family, 1, 0.0) == pytest.approx(0.0, abs=1e-14)
        assert m_function(space, family, 1, 0.0, 1) == pytest.approx(slope)

    family = MFamily.HIGHER_REGULARITY
    assert m_function(space, family, 0, 0.0) == pytest.approx(1.0)
    assert m_function(space, family, 0, 0.0, 1) == pytest.approx(0.0, abs=1e-10)
    assert m_function(space, family, 0, 0.0, 2) == pytest.approx(0.0, abs=1e-8)
    assert m_function(space, family, 1, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert m_function(space, family, 1, 0.0, 1) == pytest.approx(1.0)
    assert m_function(space, family, 2, 0.0) == pytest.approx(0.0, abs=1e-14)
    assert m_function(space, family, 2, 0.0, 1) == pytest.approx(0.0, abs=1e-10)
    assert m_function(space, family, 2, 0.0, 2) == pytest.approx(1.0)
    logger.info(f"✓ M functions for p={p}, r={r}")


def test_m_function_support_near_zero():
    space = UnivariateSplineSpace(3, 1, 4)
    for family in MFamily:
        assert m_function(space, family, 0, 0.9) == 0.0
        assert m_function(space, family, 1, 0.9) == 0.0


def test_m_function_rejects_bad_index():
    space = UnivariateSplineSpace(3, 1, 4)
    with pytest.raises(ParameterError):
        m_function(space, MFamily.BASE, 2, 0.1)
    with pytest.raises(ParameterError):
        m_function(space, MFamily.HIGHER_REGULARITY, 3, 0.1)
    with pytest.raises(ParameterError):
        m_function(space, MFamily.BASE, 0, 0.1, 3)


def test_nesting():
    coarse = UnivariateSplineSpace(3, 1, 2)
    assert coarse.nests_in(UnivariateSplineSpace(3, 1, 4))
    assert coarse.nests_in(UnivariateSplineSpace(4, 1, 2))
    assert coarse.nests_in(UnivariateSplineSpace(3, 0, 2))
    assert not coarse.nests_in(UnivariateSplineSpace(3, 1, 3))
    assert not coarse.nests_in(UnivariateSplineSpace(3, 2, 4))
    assert not coarse.nests_in(UnivariateSplineSpace(2, 1, 4))


def test_prolongation_reproduces_functions(rng):
    coarse = UnivariateSplineSpace(3, 1, 2)
    fine = UnivariateSplineSpace(4, 1, 4)
    P = prolongation(coarse, fine)
    assert P.shape == (fine.dimension, coarse.dimension)
    coeffs = rng.standard_normal(coarse.dimension)
    xs = np.linspace(0.0, 1.0, 23)
    np.testing.assert_allclose(
        collocation_matrix(fine, xs) @ (P @ coeffs),
        collocation_matrix(coarse, xs) @ coeffs,
        atol=1e-11,
    )


def test_refine_patch_keeps_geometry(rng):
    space = TensorSplineSpace.uniform(2, 1, 2)
    control = rng.standard_normal(space.shape + (3,))
    patch = TensorSplinePatch(space, control)
    for refined in (refine(patch, insert_knots=1), refine(patch, elevate_degree=1), refine(patch, 1, 1)):
        for xi in rng.random((10, 2)):
            np.testing.assert_allclose(eval_patch(refined, xi).point, eval_patch(patch, xi).point, atol=1e-12)
    logger.info("✓ Refinement keeps the point map")


def test_refine_rejects_non_nesting_target():
    with pytest.raises(ParameterError):
        refine(UnivariateSplineSpace(3, 1, 2), target=UnivariateSplineSpace(3, 1, 3))


def test_bezier_extraction_matches_basis(rng):
    space = UnivariateSplineSpace(4, 2, 3)
    extraction = compute_bezier_extraction_1d(space.knots, space.p)
    assert extraction.shape == (space.k, space.p + 1, space.p + 1)
    for e in range(space.k):
        for t in rng.uniform(0.05, 0.95, 4):
            first, table = eval_basis(space, (e + t) * space.h)
            assert first == e * (space.p - space.r)
            np.testing.assert_allclose(bernstein(t, space.p)[0] @ extraction[e].T, table[0], atol=1e-12)


def test_element_rules_integrate_polynomials():
    space = UnivariateSplineSpace(3, 1, 4)
    rules = element_rules(space, 4)
    assert len(rules) == space.k
    total = sum(float(rule.weights.sum()) for rule in rules)
    assert total == pytest.approx(1.0)
    cubic = sum(float(rule.weights @ rule.points ** 3) for rule in rules)
    assert cubic == pytest.approx(0.25)


def test_bilinear_patch_evaluation():
    space = TensorSplineSpace.uniform(1, 0, 1)
    control = np.array([[[0, 0, 0], [0, 1, 0]], [[2, 0, 0], [2, 1, 1]]], dtype=float)
    evaluation = eval_patch(TensorSplinePatch(space, control), (0.5, 0.25), 1)
    np.testing.assert_allclose(evaluation.point, [1.0, 0.25, 0.125])
    np.testing.assert_allclose(evaluation.jacobian[:, 0], [2.0, 0.0, 0.25])
    np.testing.assert_allclose(evaluation.jacobian[:, 1], [0.0, 1.0, 0.5])


def test_tensor_space_requires_equal_directions():
    with pytest.raises(ParameterError):
        TensorSplineSpace(UnivariateSplineSpace(3, 1, 2), UnivariateSplineSpace(3, 1, 4))
