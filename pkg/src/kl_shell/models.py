"""
Shell Data Models

Material, loads and boundary conditions of a Kirchhoff-Love shell problem.
"""

from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator

from multipatch_topology import Side


class BoundaryKind(str, Enum):
    """Weak boundary condition types."""
    CLAMPED = "clamped"   # displacement and normal rotation
    PINNED = "pinned"     # displacement only


class ShellMaterial(BaseModel):
    """Isotropic linear elastic shell material."""

    youngs_modulus: float = Field(..., gt=0.0, description="Young's modulus E (force/area)")
    poisson_ratio: float = Field(..., gt=-1.0, lt=0.5, description="Poisson's ratio")
    thickness: float = Field(..., gt=0.0, description="Shell thickness t")

    @property
    def lame_lambda(self) -> float:
        """Plane-stress first Lame parameter E nu / (1 - nu^2)."""
        nu = self.poisson_ratio
        return self.youngs_modulus * nu / (1.0 - nu * nu)

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    def constitutive(self, metric: np.ndarray) -> np.ndarray:
        """
        Voigt matrix of the plane-stress tensor in curvilinear coordinates.

        Args:
            metric: Covariant metric of the undeformed surface, shape (..., 2, 2)

        Returns:
            np.ndarray: Shape (..., 3, 3) acting on [e11, e22, 2 e12]
        """
        inv = np.linalg.inv(metric)
        lam, mu = self.lame_lambda, self.shear_modulus
        idx = [(0, 0), (1, 1), (0, 1)]
        D = np.empty(metric.shape[:-2] + (3, 3))
        for i, (a, b) in enumerate(idx):
            for j, (c, d) in enumerate(idx):
                D[..., i, j] = (
                    lam * inv[..., a, b] * inv[..., c, d]
                    + mu * (inv[..., a, c] * inv[..., b, d] + inv[..., a, d] * inv[..., b, c])
                )
        return D

    @property
    def membrane_factor(self) -> float:
        return self.thickness

    @property
    def bending_factor(self) -> float:
        return self.thickness ** 3 / 12.0


class PointLoad(BaseModel):
    """Concentrated force at a parametric point of one patch."""

    patch: int = Field(..., ge=0, description="Patch index")
    xi: Tuple[float, float] = Field(..., description="Parametric location")
    force: Tuple[float, float, float] = Field(..., description="Force vector in global axes")
    scaled: bool = Field(default=True, description="Multiplied by the load factor")

    @field_validator("xi")
    @classmethod
    def validate_xi(cls, v):
        if not all(0.0 <= x <= 1.0 for x in v):
            raise ValueError(f"parametric location {v} outside [0, 1]^2")
        return v


class LoadCase(BaseModel):
    """Dead loads; the scaled part is multiplied by the load factor."""

    surface_load: Tuple[float, float, float] = Field(
        default=(0.0, 0.0, 0.0), description="Distributed load per undeformed area, global axes"
    )
    point_loads: List[PointLoad] = Field(default_factory=list, description="Concentrated loads")
    load_factor: float = Field(default=1.0, description="Load factor lambda")

    @property
    def has_surface_load(self) -> bool:
        return any(abs(c) > 0.0 for c in self.surface_load)


class EdgeCondition(BaseModel):
    """Boundary condition on one patch side."""

    patch: int = Field(..., ge=0, description="Patch index")
    side: Side = Field(..., description="Patch side")
    kind: BoundaryKind = Field(default=BoundaryKind.CLAMPED, description="Condition type")


class BoundaryConditionSet(BaseModel):
    """Weakly imposed boundary conditions."""

    edges: List[EdgeCondition] = Field(default_factory=list, description="Constrained sides")
    penalty: float = Field(default=1e4, gt=0.0, description="Dimensionless penalty scale")

    @classmethod
    def clamped(cls, sides: List[Tuple[int, Side]], penalty: float = 1e4) -> "BoundaryConditionSet":
        return cls(
            edges=[EdgeCondition(patch=i, side=side, kind=BoundaryKind.CLAMPED) for i, side in sides],
            penalty=penalty,
        )
