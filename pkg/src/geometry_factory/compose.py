"""
Polynomial Composition

Exact spline representation of F o q for a polynomial surface F of degree
at most two and a planar spline patch q.
"""

from dataclasses import dataclass

import numpy as np

from errors import ParameterError
from multipatch_topology import MultiPatchSurface
from spline_core import TensorSplinePatch, TensorSplineSpace, UnivariateSplineSpace, eval_patch_grid

MAX_DEGREE = 2


@dataclass(frozen=True)
class PolynomialSurface:
    """
    F(x, y) = sum_{i,j} c[d, i, j] x^i y^j for d = 0, 1, 2.

    Args:
        coefficients: Array of shape (3, m, m)
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 3 or c.shape[0] != 3 or c.shape[1] != c.shape[2]:
            raise ParameterError(f"coefficient array must have shape (3, m, m), got {c.shape}")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def embedding(cls) -> "PolynomialSurface":
        """(x, y) -> (x, y, 0)"""
        c = np.zeros((3, 2, 2))
        c[0, 1, 0] = 1.0
        c[1, 0, 1] = 1.0
        return cls(c)

    @classmethod
    def hyperbolic(cls) -> "PolynomialSurface":
        """(x, y) -> (x, y, x^2 - y^2)"""
        c = np.zeros((3, 3, 3))
        c[0, 1, 0] = 1.0
        c[1, 0, 1] = 1.0
        c[2, 2, 0] = 1.0
        c[2, 0, 2] = -1.0
        return cls(c)

    @property
    def degree(self) -> int:
        """Total degree."""
        i, j = np.nonzero(np.any(self.coefficients != 0.0, axis=0))
        return int((i + j).max()) if i.size else 0

    def __call__(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at planar points of shape (..., 2)."""
        points = np.asarray(points, dtype=float)
        x, y = points[..., 0], points[..., 1]
        m = self.coefficients.shape[1]
        out = np.zeros(points.shape[:-1] + (3,))
        for i in range(m):
            for j in range(m):
                term = x ** i * y ** j
                for d in range(3):
                    if self.coefficients[d, i, j] != 0.0:
                        out[..., d] += self.coefficients[d, i, j] * term
        return out


def composed_space(planar: UnivariateSplineSpace, degree: int) -> UnivariateSplineSpace:
    """Space containing F o q for q in ``planar`` and F of the given total degree."""
    if planar.k == 1:
        p = max(degree * planar.p, 1)
        return UnivariateSplineSpace(p, p - 1, 1)
    return UnivariateSplineSpace(max(degree, 1) * planar.p, planar.r, planar.k)


def compose_surface(surface: PolynomialSurface, patch: TensorSplinePatch) -> TensorSplinePatch:
    """
    Exact spline patch of F o q.

    Raises:
        ParameterError: F has degree above two or q is not planar
    """
    if surface.degree > MAX_DEGREE:
        raise ParameterError(f"polynomial surfaces of degree {surface.degree} are not supported (max {MAX_DEGREE})")
    if patch.dim != 2:
        raise ParameterError(f"composition needs a planar patch, got dimension {patch.dim}")
    univariate = composed_space(patch.space.univariate, max(surface.degree, 1))
    target = TensorSplineSpace(univariate, univariate)
    g1, g2 = target.greville_grid
    planar = eval_patch_grid(patch, g1, g2, 0)[0, 0]
    control = target.interpolate(surface(planar))
    return TensorSplinePatch(target, control)


def embed_planar(patch: TensorSplinePatch) -> TensorSplinePatch:
    """Planar patch as a surface patch in the plane z = 0 (same space)."""
    control = np.concatenate([patch.control, np.zeros(patch.control.shape[:2] + (1,))], axis=2)
    return TensorSplinePatch(patch.space, control)


def compose_multipatch(surface: PolynomialSurface, patches) -> MultiPatchSurface:
    return MultiPatchSurface([compose_surface(surface, patch) for patch in patches])
