"""
Solver Data Models

Settings, results and the equilibrium problem protocol the solvers consume.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Protocol

import numpy as np
import scipy.sparse
from pydantic import BaseModel, Field, model_validator


class EquilibriumProblem(Protocol):
    """R(u, lambda) = F_int(u) - lambda F_ref - F_const with tangent dF_int/du."""

    @property
    def n_dofs(self) -> int: ...

    @property
    def reference_load(self) -> np.ndarray: ...

    def external_force(self, lam: Optional[float] = None) -> np.ndarray: ...

    def residual(self, u: np.ndarray, lam: Optional[float] = None) -> np.ndarray: ...

    def tangent(self, u: np.ndarray) -> scipy.sparse.spmatrix: ...


class NewtonSettings(BaseModel):
    """Newton iteration controls."""

    tolerance: float = Field(default=1e-8, gt=0.0, description="Residual tolerance relative to the external force")
    absolute_tolerance: float = Field(default=1e-12, ge=0.0, description="Residual floor when the load vanishes")
    max_iterations: int = Field(default=25, ge=1, description="Iteration budget")
    line_search: bool = Field(default=False, description="Backtracking on the residual norm")
    line_search_min_step: float = Field(default=1.0 / 16.0, gt=0.0, le=1.0, description="Smallest damping factor")


class ArcLengthSettings(BaseModel):
    """Crisfield arc-length continuation controls."""

    arc_length: Optional[float] = Field(default=None, gt=0.0, description="Initial increment; None derives it from the linear step")
    initial_load_increment: float = Field(default=0.1, gt=0.0, description="Load factor of the first step when arc_length is None")
    psi: float = Field(default=0.0, ge=0.0, description="Load weight; 0 gives the cylindrical constraint")
    max_steps: int = Field(default=50, ge=1, description="Accepted steps")
    max_load: Optional[float] = Field(default=None, description="Stop once lambda exceeds this value")
    min_ratio: float = Field(default=1.0 / 1024.0, gt=0.0, le=1.0, description="Floor of the increment relative to the initial one")
    max_ratio: float = Field(default=4.0, ge=1.0, description="Ceiling of the increment relative to the initial one")
    adapt: bool = Field(default=True, description="Scale the increment by (target/iterations)^(1/2)")
    target_iterations: int = Field(default=5, ge=1, description="Desired corrector iterations per step")
    detect_limit_points: bool = Field(default=True, description="Report sign changes of the load increment")
    limit_refinements: int = Field(default=3, ge=0, description="Bisections of the increment at a limit point")
    newton: NewtonSettings = Field(default_factory=NewtonSettings, description="Corrector controls")

    @model_validator(mode="after")
    def check_ratios(self):
        if self.min_ratio > self.max_ratio:
            raise ValueError("min_ratio must not exceed max_ratio")
        return self


@dataclass
class NewtonResult:
    """Converged displacement with its residual history."""

    u: np.ndarray
    iterations: int
    history: List[float]
    converged: bool = True

    @property
    def final_residual(self) -> float:
        return self.history[-1] if self.history else 0.0


@dataclass
class PathPoint:
    """One converged equilibrium point of a continuation path."""

    step: int
    lam: float
    u: np.ndarray
    monitors: np.ndarray
    stiffness: float            # current stiffness parameter, 1 at the start
    iterations: int
    residual: float
    arc_length: float
    limit: bool = False


@dataclass
class ContinuationPath:
    """Converged points in the order they were computed."""

    points: List[PathPoint] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([p.lam for p in self.points])

    @property
    def monitors(self) -> np.ndarray:
        return np.array([p.monitors for p in self.points])

    @property
    def limit_points(self) -> List[PathPoint]:
        return [p for p in self.points if p.limit]

    @property
    def max_load(self) -> float:
        return float(self.lambdas.max()) if self.points else 0.0

    def append(self, point: PathPoint):
        self.points.append(point)
