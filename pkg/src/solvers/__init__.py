"""
Solvers Module

Solution algorithms for the assembled shell systems:
- Sparse linear solves with refinement and residual check
- Newton iteration with optional line search
- Crisfield arc-length continuation through limit points
"""

from .models import (
    EquilibriumProblem,
    NewtonSettings,
    ArcLengthSettings,
    NewtonResult,
    PathPoint,
    ContinuationPath,
)
from .linear import factorize, solve_linear
from .newton import newton
from .arc_length import ArcLengthSolver, arc_length

__all__ = [
    'EquilibriumProblem',
    'NewtonSettings',
    'ArcLengthSettings',
    'NewtonResult',
    'PathPoint',
    'ContinuationPath',
    'factorize',
    'solve_linear',
    'newton',
    'ArcLengthSolver',
    'arc_length',
]
