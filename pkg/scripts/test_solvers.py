#!/usr/bin/env python3
"""
Solver Test

Linear solves, Newton iteration and arc-length continuation on small
problems with known equilibrium paths.
"""

import logging
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pytest
import scipy.sparse
from pydantic import ValidationError

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from errors import (  # noqa: E402
    ArcLengthError,
    NewtonConvergenceError,
    ParameterError,
    SingularTangentError,
    SolverError,
)
from solvers import (  # noqa: E402
    ArcLengthSettings,
    ArcLengthSolver,
    NewtonSettings,
    arc_length,
    newton,
    solve_linear,
)

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

# peak of u (u - 1)(u - 2) / 2 on [0, 1]
SNAP_PEAK = 1.0 / (3.0 * np.sqrt(3.0))


class ScalarProblem:
    """One unknown with internal force f(u) under the load lambda * load."""

    def __init__(self, f: Callable[[float], float], df: Callable[[float], float], load: float = 1.0, lam: float = 1.0):
        self.f = f
        self.df = df
        self.load = load
        self.lam = lam

    @property
    def n_dofs(self) -> int:
        return 1

    @property
    def reference_load(self) -> np.ndarray:
        return np.array([self.load])

    def external_force(self, lam: Optional[float] = None) -> np.ndarray:
        return (self.lam if lam is None else lam) * self.reference_load

    def residual(self, u: np.ndarray, lam: Optional[float] = None) -> np.ndarray:
        return np.array([self.f(u[0])]) - self.external_force(lam)

    def tangent(self, u: np.ndarray) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(np.array([[self.df(u[0])]]))


class LinearProblem:
    """K u = lambda F."""

    def __init__(self, K: np.ndarray, F: np.ndarray):
        self.K = scipy.sparse.csr_matrix(K)
        self.F = F

    @property
    def n_dofs(self) -> int:
        return self.F.size

    @property
    def reference_load(self) -> np.ndarray:
        return self.F

    def external_force(self, lam: Optional[float] = None) -> np.ndarray:
        return (1.0 if lam is None else lam) * self.F

    def residual(self, u: np.ndarray, lam: Optional[float] = None) -> np.ndarray:
        return self.K @ u - self.external_force(lam)

    def tangent(self, u: np.ndarray) -> scipy.sparse.csr_matrix:
        return self.K


def _snap_through() -> ScalarProblem:
    return ScalarProblem(
        lambda u: 0.5 * u * (u - 1.0) * (u - 2.0),
        lambda u: 1.0 - 3.0 * u + 1.5 * u * u,
    )


def _spd(rng, n: int = 6) -> np.ndarray:
    A = rng.standard_normal((n, n))
    return A @ A.T + n * np.eye(n)


def test_solve_linear(rng):
    K = _spd(rng)
    F = rng.standard_normal(6)
    u = solve_linear(scipy.sparse.csr_matrix(K), F)
    np.testing.assert_allclose(K @ u, F, atol=1e-12)
    np.testing.assert_array_equal(solve_linear(K, np.zeros(6)), np.zeros(6))


def test_solve_linear_errors():
    with pytest.raises(SingularTangentError):
        solve_linear(scipy.sparse.csr_matrix((3, 3)), np.ones(3))
    with pytest.raises(SolverError):
        solve_linear(np.ones((2, 3)), np.ones(2))


def test_newton_on_linear_problem_takes_one_step(rng):
    problem = LinearProblem(_spd(rng), rng.standard_normal(6))
    result = newton(problem)
    assert result.converged
    assert result.iterations == 1
    assert len(result.history) == 2
    np.testing.assert_allclose(problem.K @ result.u, problem.F, atol=1e-10)


def test_newton_converges_quadratically():
    problem = ScalarProblem(lambda u: u + u ** 3, lambda u: 1.0 + 3.0 * u ** 2, lam=2.0)
    result = newton(problem, settings=NewtonSettings(tolerance=1e-12))
    assert result.u[0] == pytest.approx(1.0, abs=1e-12)
    history = np.array(result.history)
    assert history[-1] < 1e-12 * 2.0
    # the last steps at least square the error
    assert history[-2] < history[-3] ** 1.5
    logger.info(f"✓ Newton converged in {result.iterations} iterations")


def test_newton_at_explicit_load_factor():
    problem = ScalarProblem(lambda u: 2.0 * u, lambda u: 2.0)
    result = newton(problem, np.array([5.0]), lam=3.0)
    assert result.u[0] == pytest.approx(1.5)


def test_newton_divergence_carries_history():
    problem = ScalarProblem(np.arctan, lambda u: 1.0 / (1.0 + u * u), lam=0.0)
    with pytest.raises(NewtonConvergenceError) as info:
        newton(problem, np.array([2.0]), NewtonSettings(max_iterations=5))
    assert len(info.value.history) == 6
    assert info.value.history[-1] > 1.0


def test_line_search_rescues_divergent_start():
    problem = ScalarProblem(np.arctan, lambda u: 1.0 / (1.0 + u * u), lam=0.0)
    result = newton(problem, np.array([2.0]), NewtonSettings(line_search=True))
    assert abs(result.u[0]) < 1e-8
    assert np.all(np.diff(result.history) < 0.0)


def test_arc_length_passes_limit_point():
    settings = ArcLengthSettings(arc_length=0.05, max_steps=40, adapt=False)
    path = ArcLengthSolver(_snap_through(), settings, monitor=lambda u: u.copy()).run()

    assert len(path.limit_points) == 1
    assert path.limit_points[0].lam == pytest.approx(SNAP_PEAK, abs=1e-3)
    assert path.max_load == pytest.approx(SNAP_PEAK, abs=1e-3)
    # past the peak the load falls to the second zero and the stiffness turns negative
    assert path.monitors[-1, 0] == pytest.approx(2.0, abs=0.06)
    assert min(path.lambdas) < -0.15
    assert any(point.stiffness < 0.0 for point in path.points)
    problem = _snap_through()
    for point in path.points:
        assert abs(problem.residual(point.u, point.lam)[0]) < 1e-8
    logger.info(f"✓ Limit load {path.max_load:.5f} (exact {SNAP_PEAK:.5f})")


def test_arc_length_stops_at_max_load(rng):
    problem = LinearProblem(_spd(rng, 4), rng.standard_normal(4))
    path = arc_length(problem, ArcLengthSettings(max_load=1.0, max_steps=200))
    assert path.lambdas[-1] >= 1.0
    assert path.lambdas[-2] < 1.0
    assert np.all(np.diff(path.lambdas) > 0.0)
    assert not path.limit_points


def test_first_increment_from_load_step(rng):
    problem = LinearProblem(_spd(rng, 4), rng.standard_normal(4))
    path = arc_length(problem, ArcLengthSettings(max_steps=1, initial_load_increment=0.25))
    assert path.lambdas[1] == pytest.approx(0.25, rel=1e-8)


def test_arc_length_error_keeps_partial_path():
    problem = ScalarProblem(lambda u: 0.0, lambda u: 0.0)
    with pytest.raises(ArcLengthError) as info:
        arc_length(problem, ArcLengthSettings(arc_length=0.1))
    assert len(info.value.path) == 1
    assert info.value.path.points[0].lam == 0.0


def test_arc_length_needs_reference_load():
    problem = ScalarProblem(lambda u: u, lambda u: 1.0, load=0.0)
    with pytest.raises(ParameterError):
        ArcLengthSolver(problem)


def test_settings_validation():
    with pytest.raises(ValidationError):
        ArcLengthSettings(psi=-1.0)
    with pytest.raises(ValidationError):
        ArcLengthSettings(max_ratio=0.5)
    with pytest.raises(ValidationError):
        NewtonSettings(tolerance=0.0)
    with pytest.raises(ValidationError):
        NewtonSettings(line_search_min_step=2.0)


class _DriftingSolver(ArcLengthSolver):
    """Stretches every increment after the first one off the constraint sphere."""

    def step(self, u_n, lam_n, arc_length, previous):
        increment = super().step(u_n, lam_n, arc_length, previous)
        if previous is not None:
            increment.du = 1.01 * increment.du
        return increment


def test_constraint_violation_raises_with_path(rng):
    problem = LinearProblem(_spd(rng, 4), rng.standard_normal(4))
    solver = _DriftingSolver(problem, ArcLengthSettings(arc_length=0.1, max_steps=5, adapt=False))
    with pytest.raises(ArcLengthError, match="constraint") as info:
        solver.run()
    # starting point and the first accepted step
    assert len(info.value.path) == 2
    logger.info(f"✓ Constraint violation stopped the path: {info.value}")
