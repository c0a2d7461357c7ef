"""
Shared exception hierarchy.

Input problems derive from ValueError, numerical failures of the solvers
derive from RuntimeError. The CLI maps the two families to exit codes 3 and 2.
"""

from typing import Any, List, Optional


class C1ShellError(Exception):
    """Base class for every error raised by the library."""


class InputError(C1ShellError, ValueError):
    """Invalid data handed to a constructor or operation."""


class DomainError(InputError):
    """Parameter value outside the parametric domain [0, 1]."""


class ParameterError(InputError):
    """Invalid discretisation parameter or index."""


class TopologyError(InputError):
    """Non-conforming or inconsistent multi-patch layout."""


class UnsupportedTopologyError(TopologyError):
    """Layout features the C1 construction does not handle (T-junctions)."""


class SingularGeometryError(InputError):
    """Degenerate Jacobian at an evaluation point."""


class NotASG1Error(InputError):
    """No linear gluing data reproduces the interface condition."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class DegenerateGluingError(InputError):
    """Gluing functions change sign on the interface."""


class SingularConfigurationError(InputError):
    """Rank-deficient least-squares system."""


class ConstructionError(InputError):
    """The C1 space could not be built on the given surface."""


class FactoryInvariantError(InputError):
    """A benchmark geometry failed its own verification."""


class GeometryParseError(InputError):
    """Malformed geometry file."""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class SolverError(C1ShellError, RuntimeError):
    """Linear solve failed or produced an inaccurate solution."""


class SingularTangentError(SolverError):
    """Tangent stiffness could not be factorized."""


class NewtonConvergenceError(SolverError):
    """Newton iteration exceeded its iteration budget."""

    def __init__(self, message: str, history: Optional[List[float]] = None):
        super().__init__(message)
        self.history = list(history or [])


class ArcLengthError(SolverError):
    """Continuation stalled below the minimum increment or lost the arc-length constraint."""

    def __init__(self, message: str, path: Any = None):
        super().__init__(message)
        self.path = path
