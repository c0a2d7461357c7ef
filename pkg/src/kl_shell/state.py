"""
Shell State

Displacement coefficients over a C1 space and the per-patch displacement
tables extracted from them.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from c1_basis import C1Space
from errors import ParameterError
from spline_core import ScalarSplineFunction, eval_patch


def split_components(u: np.ndarray, dim: int) -> np.ndarray:
    """Component-major vector (index c*dim + j) to a (dim, 3) array."""
    return np.asarray(u, dtype=float).reshape(3, dim).T


def join_components(values: np.ndarray) -> np.ndarray:
    """(dim, 3) array to the component-major vector."""
    return np.ascontiguousarray(np.asarray(values, dtype=float).T).ravel()


@dataclass
class ShellState:
    """Displacement u = sum_j sum_c u[c*dim + j] phi_j e_c over a C1 space."""

    space: C1Space
    u: Optional[np.ndarray] = None
    _tables: Optional[List[np.ndarray]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.u is None:
            self.u = np.zeros(3 * self.space.dimension)
        self.u = np.asarray(self.u, dtype=float)
        if self.u.shape != (3 * self.space.dimension,):
            raise ParameterError(f"displacement vector must have length {3 * self.space.dimension}")

    @property
    def n_dofs(self) -> int:
        return 3 * self.space.dimension

    @property
    def tables(self) -> List[np.ndarray]:
        """Displacement coefficient tables (n, n, 3) per patch."""
        if self._tables is None:
            self._tables = self.space.extraction(split_components(self.u, self.space.dimension))
        return self._tables

    def displacement(self, patch: int, xi: Tuple[float, float], max_deriv: int = 0):
        """Displacement vector (and parametric derivatives) at a point of a patch."""
        table = self.tables[patch]
        values = [
            ScalarSplineFunction(self.space.tensor_space, table[:, :, c]).evaluate(xi, max_deriv)
            for c in range(3)
        ]
        point = np.array([v.point for v in values])
        if max_deriv == 0:
            return point
        jacobian = np.stack([v.jacobian for v in values])
        if max_deriv == 1:
            return point, jacobian
        return point, jacobian, np.stack([v.hessian for v in values])

    def deformed_point(self, patch: int, xi: Tuple[float, float]) -> np.ndarray:
        return eval_patch(self.space.surface[patch], xi).point + self.displacement(patch, xi)
