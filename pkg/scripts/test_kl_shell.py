#!/usr/bin/env python3
"""
Kirchhoff-Love Shell Test

Rigid-body modes, tangent consistency, weak boundary penalties, loads and
membrane stress recovery on the two-square plate.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from c1_basis import build_c1_space  # noqa: E402
from errors import ParameterError  # noqa: E402
from geometry_factory import two_squares  # noqa: E402
from kl_shell import (  # noqa: E402
    BoundaryConditionSet,
    LoadCase,
    PointLoad,
    ShellMaterial,
    ShellModel,
    ShellState,
    assemble,
    join_components,
    membrane_stress,
    sample_von_mises,
    split_components,
    strains,
    strain_energy,
    von_mises_membrane,
)
from multipatch_topology import Side, build_topology  # noqa: E402
from solvers import NewtonSettings, newton, solve_linear  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

MATERIAL = ShellMaterial(youngs_modulus=1000.0, poisson_ratio=0.3, thickness=0.1)


@pytest.fixture(scope="module")
def space():
    surface = two_squares()
    return build_c1_space(surface, build_topology(surface), None, 3, 1, 4)


def _vector_field(space, fx, fy, fz) -> np.ndarray:
    """Displacement coefficients of a field given per component as a function of the point."""
    columns = []
    for f in (fx, fy, fz):
        coefficients, residual = space.least_squares_fit(f)
        assert residual < 1e-8
        columns.append(coefficients)
    return join_components(np.column_stack(columns))


def _zero(x):
    return np.zeros(len(x))


def test_component_layout_roundtrip(rng):
    values = rng.standard_normal((7, 3))
    u = join_components(values)
    assert u[7] == values[0, 1]
    np.testing.assert_array_equal(split_components(u, 7), values)


def test_rigid_translation_is_force_free(space):
    model = ShellModel(space, MATERIAL)
    u = _vector_field(space, lambda x: np.full(len(x), 0.3), lambda x: np.full(len(x), -1.0), lambda x: np.full(len(x), 2.0))
    assert np.abs(model.internal_force(u)).max() < 1e-7
    assert model.energy(u) == pytest.approx(0.0, abs=1e-9)
    logger.info("✓ Translations carry no internal force")


@pytest.mark.parametrize("fields", [
    (lambda x: -x[:, 1], lambda x: x[:, 0], _zero),
    (_zero, _zero, lambda x: x[:, 1]),
    (_zero, _zero, lambda x: -x[:, 0]),
])
def test_linearized_rotations_are_in_the_kernel(space, fields):
    model = ShellModel(space, MATERIAL)
    K, _ = model.linear_system()
    u = _vector_field(space, *fields)
    scale = abs(K).max() * np.abs(u).max()
    assert np.abs(K @ u).max() <= 1e-9 * scale


def test_tangent_matches_difference_quotient(space, rng):
    model = ShellModel(space, MATERIAL)
    u = 1e-3 * rng.standard_normal(model.n_dofs)
    v = rng.standard_normal(model.n_dofs)
    step = 1e-6
    difference = (model.internal_force(u + step * v) - model.internal_force(u - step * v)) / (2.0 * step)
    tangent = model.tangent(u) @ v
    assert np.linalg.norm(tangent - difference) <= 1e-5 * np.linalg.norm(tangent)
    logger.info("✓ Tangent consistent with the internal force")


def test_residual_is_energy_gradient(space, rng):
    loads = LoadCase(surface_load=(0.0, 0.0, -0.5))
    model = ShellModel(space, MATERIAL, loads)
    u = 1e-3 * rng.standard_normal(model.n_dofs)
    v = rng.standard_normal(model.n_dofs)
    step = 1e-6
    difference = (model.energy(u + step * v) - model.energy(u - step * v)) / (2.0 * step)
    assert difference == pytest.approx(model.residual(u) @ v, rel=1e-5)


def test_tangent_is_symmetric(space, rng):
    model = ShellModel(space, MATERIAL)
    K = model.tangent(1e-2 * rng.standard_normal(model.n_dofs))
    assert abs(K - K.T).max() == 0.0


def test_clamped_penalty_scaling(space):
    """A unit lift of a clamped side of length 1 with k = 4 costs alpha E t / h."""
    bcs = BoundaryConditionSet.clamped([(0, Side.WEST)], penalty=1e4)
    model = ShellModel(space, MATERIAL, bcs=bcs)
    u = _vector_field(space, _zero, _zero, lambda x: np.ones(len(x)))
    expected = 1e4 * MATERIAL.youngs_modulus * MATERIAL.thickness / 0.25
    assert u @ (model.penalty_matrix @ u) == pytest.approx(expected, rel=1e-8)
    assert abs(model.penalty_matrix - model.penalty_matrix.T).max() <= 1e-10 * expected


def test_surface_load_resultant(space):
    loads = LoadCase(surface_load=(0.0, 0.0, -2.0))
    model = ShellModel(space, MATERIAL, loads)
    u = _vector_field(space, _zero, _zero, lambda x: np.ones(len(x)))
    # work of the load on a unit lift equals the total force over the area 2
    assert model.external_force() @ u == pytest.approx(-4.0, rel=1e-9)


def test_point_loads_split_by_scaling(space):
    loads = LoadCase(
        point_loads=[
            PointLoad(patch=1, xi=(1.0, 0.5), force=(1.0, 0.0, 0.5)),
            PointLoad(patch=1, xi=(1.0, 0.5), force=(0.0, 0.0, 3.0), scaled=False),
        ],
        load_factor=2.0,
    )
    model = ShellModel(space, MATERIAL, loads)
    u = _vector_field(space, lambda x: np.ones(len(x)), _zero, lambda x: np.ones(len(x)))
    assert model.reference_load @ u == pytest.approx(1.5, rel=1e-9)
    assert model.constant_load @ u == pytest.approx(3.0, rel=1e-9)
    assert model.external_force() @ u == pytest.approx(6.0, rel=1e-9)


def test_cantilever_linear_and_newton_agree(space):
    loads = LoadCase(surface_load=(0.0, 0.0, -1e-6))
    bcs = BoundaryConditionSet.clamped([(0, Side.WEST)])
    model = ShellModel(space, MATERIAL, loads, bcs)
    K, F = model.linear_system()
    u_linear = solve_linear(K, F)
    assert strain_energy(ShellState(space, u_linear), K) == pytest.approx(0.5 * F @ u_linear, rel=1e-9)

    tip = model.monitor(u_linear, 1, (1.0, 0.5))
    assert tip[2] < 0.0
    result = newton(model, np.zeros(model.n_dofs), NewtonSettings(tolerance=1e-10))
    assert np.linalg.norm(result.u - u_linear) <= 1e-3 * np.linalg.norm(u_linear)

    displacement, rotation = model.boundary_measures(u_linear)
    assert displacement < 1e-3 * abs(tip[2])
    logger.info(f"✓ Cantilever tip deflection {tip[2]:.4e}")


def test_assemble_wrapper(space, rng):
    loads = LoadCase(surface_load=(0.0, 0.0, -1.0))
    bcs = BoundaryConditionSet.clamped([(0, Side.WEST)])
    model = ShellModel(space, MATERIAL, loads, bcs)
    K, F = assemble(ShellState(space), MATERIAL, loads, bcs)
    assert abs(K - model.tangent(np.zeros(model.n_dofs))).max() == 0.0
    np.testing.assert_array_equal(F, model.external_force())
    u = 1e-3 * rng.standard_normal(model.n_dofs)
    np.testing.assert_allclose(assemble(ShellState(space, u), MATERIAL, loads, bcs, "residual"), model.residual(u))


def test_uniaxial_membrane_stress(space):
    strain = 1e-3
    u = _vector_field(space, lambda x: strain * x[:, 0], _zero, _zero)
    state = ShellState(space, u)
    green = strain + 0.5 * strain ** 2
    E, nu = MATERIAL.youngs_modulus, MATERIAL.poisson_ratio
    expected = np.array([[E / (1 - nu ** 2) * green, 0.0], [0.0, E * nu / (1 - nu ** 2) * green]])
    np.testing.assert_allclose(membrane_stress(state, MATERIAL, 0, (0.3, 0.6)), expected, atol=1e-8)
    moved = state.deformed_point(0, (0.5, 0.5))
    np.testing.assert_allclose(moved, [0.5 * (1.0 + strain), 0.5, 0.0], atol=1e-8)

    s11, s22 = expected[0, 0], expected[1, 1]
    von_mises = np.sqrt(s11 ** 2 + s22 ** 2 - s11 * s22)
    assert von_mises_membrane(state, MATERIAL, 1, (0.5, 0.5)) == pytest.approx(von_mises, rel=1e-7)
    assert von_mises_membrane(state, MATERIAL, 1, (0.5, 0.5), scale=1e-6) == pytest.approx(1e-6 * von_mises, rel=1e-7)

    field = sample_von_mises(ShellState(space), MATERIAL, 0, 5)
    assert field.shape == (5, 5)
    assert np.abs(field).max() < 1e-12


def test_material_validation():
    with pytest.raises(ValidationError):
        ShellMaterial(youngs_modulus=1.0, poisson_ratio=0.5, thickness=0.1)
    with pytest.raises(ValidationError):
        ShellMaterial(youngs_modulus=-1.0, poisson_ratio=0.3, thickness=0.1)
    with pytest.raises(ValidationError):
        PointLoad(patch=0, xi=(1.2, 0.0), force=(0.0, 0.0, 1.0))


def test_plane_stress_constitutive_matrix():
    D = MATERIAL.constitutive(np.eye(2))
    E, nu = MATERIAL.youngs_modulus, MATERIAL.poisson_ratio
    np.testing.assert_allclose(D, [
        [E / (1 - nu ** 2), E * nu / (1 - nu ** 2), 0.0],
        [E * nu / (1 - nu ** 2), E / (1 - nu ** 2), 0.0],
        [0.0, 0.0, E / (2 * (1 + nu))],
    ])


def test_displacement_length_is_checked(space):
    model = ShellModel(space, MATERIAL)
    with pytest.raises(ParameterError):
        model.internal_force(np.zeros(model.n_dofs - 1))
    with pytest.raises(ParameterError):
        ShellState(space, np.zeros(5))


def test_curvature_change_follows_the_normal(space):
    """Bending the plate towards its +z normal gives a positive curvature change."""
    u = _vector_field(space, _zero, _zero, lambda x: 0.5 * x[:, 0] ** 2)
    eps, kappa = strains(ShellState(space, u), 0, (0.5, 0.5))
    # deformed normal at x = 0.5 is (-0.5, 0, 1) / |.|, second derivative (0, 0, 1)
    expected = 1.0 / np.sqrt(1.25)
    assert kappa[0, 0] == pytest.approx(expected, rel=1e-7)
    assert abs(kappa[1, 1]) < 1e-8
    assert abs(kappa[0, 1]) < 1e-8
    assert eps[0, 0] == pytest.approx(0.5 * 0.5 ** 2, rel=1e-7)
