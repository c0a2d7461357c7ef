"""
Newton Iteration

Full Newton on R(u, lambda) = 0 at a fixed load factor.
"""

from typing import Optional

import numpy as np
import structlog

from errors import NewtonConvergenceError
from .linear import factorize
from .models import EquilibriumProblem, NewtonResult, NewtonSettings

log = structlog.get_logger(__name__)


def residual_scale(problem: EquilibriumProblem, lam: Optional[float], settings: NewtonSettings) -> float:
    """Norm the residual is measured against."""
    return max(float(np.linalg.norm(problem.external_force(lam))), settings.absolute_tolerance / settings.tolerance, 1e-300)


def _line_search(problem: EquilibriumProblem, u: np.ndarray, du: np.ndarray, lam, norm: float, settings: NewtonSettings):
    step = 1.0
    while True:
        trial = u + step * du
        residual = problem.residual(trial, lam)
        trial_norm = float(np.linalg.norm(residual))
        if trial_norm <= (1.0 - 1e-4 * step) * norm or step <= settings.line_search_min_step:
            return trial, residual, trial_norm
        step *= 0.5


def newton(
    problem: EquilibriumProblem,
    u0: Optional[np.ndarray] = None,
    settings: Optional[NewtonSettings] = None,
    lam: Optional[float] = None,
) -> NewtonResult:
    """
    Solve R(u, lam) = 0 starting from u0.

    Returns:
        NewtonResult: solution, number of linear solves and residual norms

    Raises:
        NewtonConvergenceError: iteration budget exhausted (carries the history)
        SingularTangentError: tangent could not be factorized
    """
    settings = settings or NewtonSettings()
    u = np.zeros(problem.n_dofs) if u0 is None else np.array(u0, dtype=float)
    scale = residual_scale(problem, lam, settings)
    residual = problem.residual(u, lam)
    norm = float(np.linalg.norm(residual))
    history = [norm]

    for iteration in range(1, settings.max_iterations + 1):
        if norm <= settings.tolerance * scale or norm <= settings.absolute_tolerance:
            return NewtonResult(u, iteration - 1, history)
        du = -factorize(problem.tangent(u)).solve(residual)
        if settings.line_search:
            u, residual, norm = _line_search(problem, u, du, lam, norm, settings)
        else:
            u = u + du
            residual = problem.residual(u, lam)
            norm = float(np.linalg.norm(residual))
        history.append(norm)
        log.debug("newton_iteration", iteration=iteration, residual=norm, relative=norm / scale)
        if not np.isfinite(norm):
            break

    if norm <= settings.tolerance * scale or norm <= settings.absolute_tolerance:
        return NewtonResult(u, len(history) - 1, history)
    raise NewtonConvergenceError(
        f"Newton did not converge in {settings.max_iterations} iterations "
        f"(relative residual {norm / scale:.3e})",
        history,
    )
