"""
C1 Checks

Two-sided evaluation of every basis function across every interface:
values and surface gradients must agree.
"""

import logging
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from multipatch_topology import Edge
from spline_core import collocation_matrix, eval_patch
from .space import C1Space, expected_dimension

logger = logging.getLogger(__name__)

C1_TOL = 1e-9
INTERFACE_SAMPLES = 50


class InterfaceJump(BaseModel):
    """Largest relative jumps over all basis functions on one interface."""
    edge: int = Field(..., description="Interface edge index")
    value: float = Field(..., description="Maximum relative jump of the function values")
    gradient: float = Field(..., description="Maximum relative jump of the surface gradients")
    function: str = Field(default="", description="Basis function with the largest jump")


class C1CheckReport(BaseModel):
    """C1 continuity and dimension check of a space."""
    tolerance: float = Field(..., description="Relative jump tolerance")
    samples: int = Field(..., description="Points per interface")
    dimension: int = Field(..., description="Enumerated dimension")
    expected_dimension: int = Field(..., description="Dimension formula")
    interfaces: List[InterfaceJump] = Field(default_factory=list)

    @property
    def max_value_jump(self) -> float:
        return max((j.value for j in self.interfaces), default=0.0)

    @property
    def max_gradient_jump(self) -> float:
        return max((j.gradient for j in self.interfaces), default=0.0)

    @property
    def passed(self) -> bool:
        return (
            self.dimension == self.expected_dimension
            and self.max_value_jump <= self.tolerance
            and self.max_gradient_jump <= self.tolerance
        )


def _side_samples(space: C1Space, patch: int, xis: List[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    """Values (m, dim) and surface gradients (m, 3, dim) of all basis functions at points of one patch."""
    block = space.matrix[space.patch_rows(patch)]
    geometry = space.surface[patch]
    values, gradients = [], []
    for xi in xis:
        b1 = collocation_matrix(space.space, [xi[0]], 0)
        b2 = collocation_matrix(space.space, [xi[1]], 0)
        d1 = collocation_matrix(space.space, [xi[0]], 1)
        d2 = collocation_matrix(space.space, [xi[1]], 1)
        rows = np.vstack([np.kron(b1, b2), np.kron(d1, b2), np.kron(b1, d2)])
        local = np.asarray((block.T @ rows.T).T)
        J = eval_patch(geometry, xi, 1).jacobian
        contra = J @ np.linalg.inv(J.T @ J)
        values.append(local[0])
        gradients.append(contra @ local[1:])
    return np.array(values), np.array(gradients)


def _interface_jump(space: C1Space, edge: Edge, samples: int) -> InterfaceJump:
    ts = np.linspace(0.0, 1.0, samples)
    xis1 = [edge.side1.point(float(t)) for t in ts]
    xis2 = [edge.side2.point(float(1.0 - t if edge.reversed else t)) for t in ts]
    v1, g1 = _side_samples(space, edge.patch1, xis1)
    v2, g2 = _side_samples(space, edge.patch2, xis2)

    coefficient_scale = np.asarray(abs(space.matrix).max(axis=0).todense()).ravel()
    diameter = max(space.surface.bounding_box_diagonal, 1e-300)
    value_scale = np.maximum(coefficient_scale, 1e-300)
    gradient_scale = np.maximum(
        np.maximum(np.linalg.norm(g1, axis=1).max(axis=0), np.linalg.norm(g2, axis=1).max(axis=0)),
        value_scale / diameter,
    )
    value_jump = np.abs(v1 - v2).max(axis=0) / value_scale
    gradient_jump = np.linalg.norm(g1 - g2, axis=1).max(axis=0) / gradient_scale
    worst = int(np.argmax(np.maximum(value_jump, gradient_jump)))
    return InterfaceJump(
        edge=edge.index,
        value=float(value_jump.max()),
        gradient=float(gradient_jump.max()),
        function=str(space.functions[worst]),
    )


def check_c1(space: C1Space, samples: int = INTERFACE_SAMPLES, tol: float = C1_TOL) -> C1CheckReport:
    """
    Compare values and surface gradients of every basis function on both
    sides of every interface, and the enumerated dimension with the formula.
    """
    report = C1CheckReport(
        tolerance=tol,
        samples=samples,
        dimension=space.dimension,
        expected_dimension=expected_dimension(space.topology, space.space),
    )
    for edge in space.topology.interfaces:
        report.interfaces.append(_interface_jump(space, edge, samples))
    logger.debug(
        f"C1 check: value jump {report.max_value_jump:.2e}, gradient jump {report.max_gradient_jump:.2e}"
    )
    return report
