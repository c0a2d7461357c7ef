"""
Gluing Data Models

Gluing functions of one edge and the AS-G1 verification report.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from numpy.polynomial import Polynomial
from pydantic import BaseModel, Field


def linear(a0: float, a1: float) -> Polynomial:
    """Linear polynomial with values a0 at 0 and a1 at 1."""
    return Polynomial([a0, a1 - a0])


def quadratic_bernstein(c0: float, c1: float, c2: float) -> Polynomial:
    """Quadratic polynomial with Bernstein coefficients (c0, c1, c2)."""
    return Polynomial([c0, 2.0 * (c1 - c0), c0 - 2.0 * c1 + c2])


ONE = linear(1.0, 1.0)
ZERO = linear(0.0, 0.0)


@dataclass
class EdgeGluingData:
    """
    Gluing functions of an edge in standard form.

    alpha1/beta1 belong to the patch whose WEST side carries the edge,
    alpha2/beta2 to the patch whose SOUTH side carries it.
    """

    alpha1: Polynomial
    alpha2: Polynomial
    beta1: Polynomial
    beta2: Polynomial
    residual: float = 0.0
    edge: Optional[int] = None

    @property
    def beta(self) -> Polynomial:
        return self.alpha1 * self.beta2 + self.alpha2 * self.beta1

    @property
    def is_trivial(self) -> bool:
        """alpha = 1 and beta = 0 up to round-off."""
        xs = np.array([0.0, 1.0])
        return (
            np.allclose(self.alpha1(xs), 1.0, atol=1e-12)
            and np.allclose(self.alpha2(xs), 1.0, atol=1e-12)
            and np.allclose(self.beta1(xs), 0.0, atol=1e-12)
            and np.allclose(self.beta2(xs), 0.0, atol=1e-12)
        )

    def alpha_positive(self) -> bool:
        a1 = self.alpha1(np.array([0.0, 1.0]))
        a2 = self.alpha2(np.array([0.0, 1.0]))
        return bool(a1[0] * a1[1] > 0 and a2[0] * a2[1] > 0 and a1[0] * a2[0] > 0)

    @staticmethod
    def boundary(edge: Optional[int] = None) -> "EdgeGluingData":
        return EdgeGluingData(ONE, ONE, ZERO, ZERO, 0.0, edge)


class EdgeReport(BaseModel):
    """AS-G1 check of one edge."""
    edge: int = Field(..., description="Edge index")
    interface: bool = Field(..., description="True for interfaces, False for boundary edges")
    residual: float = Field(..., description="Maximum relative gluing residual")
    alpha_positive: bool = Field(..., description="alpha1 * alpha2 > 0 on [0, 1]")
    linear: bool = Field(..., description="Linear gluing functions exist")
    passed: bool = Field(..., description="Edge is AS-G1 within tolerance")
    message: str = Field(default="", description="Failure reason")


class GluingReport(BaseModel):
    """AS-G1 verification of every edge of a surface."""
    tolerance: float = Field(..., description="Relative residual tolerance")
    edges: List[EdgeReport] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(edge.passed for edge in self.edges)

    @property
    def failed(self) -> List[EdgeReport]:
        return [edge for edge in self.edges if not edge.passed]

    @property
    def max_residual(self) -> float:
        return max((edge.residual for edge in self.edges), default=0.0)
