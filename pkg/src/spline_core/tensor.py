"""
Tensor-Product Splines

Tensor-product spaces, vector-valued patches, scalar spline functions and
exact interpolation at tensor Greville points.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from errors import ParameterError
from .univariate import (
    UnivariateSplineSpace,
    _check_parameter,
    collocation_tables,
    eval_basis,
    greville_abscissae,
)


@dataclass(frozen=True)
class TensorSplineSpace:
    """S^{(p,p),(r,r)} built from two univariate spaces with equal (p, r, k)."""

    first: UnivariateSplineSpace
    second: UnivariateSplineSpace

    def __post_init__(self):
        if self.first != self.second:
            raise ParameterError(
                f"both directions must share (p, r, k): {self.first} vs {self.second}"
            )

    @classmethod
    def uniform(cls, p: int, r: int, k: int) -> "TensorSplineSpace":
        space = UnivariateSplineSpace(p, r, k)
        return cls(space, space)

    @property
    def univariate(self) -> UnivariateSplineSpace:
        return self.first

    @property
    def shape(self) -> Tuple[int, int]:
        return self.first.dimension, self.second.dimension

    @property
    def dimension(self) -> int:
        return self.first.dimension * self.second.dimension

    @cached_property
    def greville_grid(self) -> Tuple[np.ndarray, np.ndarray]:
        return greville_abscissae(self.first), greville_abscissae(self.second)

    @cached_property
    def _greville_lu(self):
        g = greville_abscissae(self.first)
        return scipy.linalg.lu_factor(collocation_tables(self.first, g, 0)[0])

    def interpolate(self, values: np.ndarray) -> np.ndarray:
        """
        Coefficients of the spline interpolating ``values`` at the tensor Greville grid.

        Args:
            values: Array of shape (n, n) or (n, n, d)

        Returns:
            np.ndarray: Coefficient table of the same shape
        """
        lu = self._greville_lu
        flat = values.reshape(values.shape[0], values.shape[1], -1)
        coeffs = np.empty_like(flat, dtype=float)
        for c in range(flat.shape[2]):
            tmp = scipy.linalg.lu_solve(lu, flat[:, :, c])
            coeffs[:, :, c] = scipy.linalg.lu_solve(lu, tmp.T).T
        return coeffs.reshape(values.shape)


class PatchEvaluation(NamedTuple):
    """Point, Jacobian (d x 2) and Hessian (d x 2 x 2) of a patch."""

    point: np.ndarray
    jacobian: Optional[np.ndarray]
    hessian: Optional[np.ndarray]


@dataclass
class TensorSplinePatch:
    """Vector-valued tensor-product spline patch (d = 2 planar, d = 3 surface)."""

    space: TensorSplineSpace
    control: np.ndarray

    def __post_init__(self):
        self.control = np.asarray(self.control, dtype=float)
        if self.control.ndim != 3 or self.control.shape[:2] != self.space.shape:
            raise ParameterError(
                f"control table shape {self.control.shape} does not match space {self.space.shape}"
            )

    @property
    def dim(self) -> int:
        return self.control.shape[2]

    def copy(self) -> "TensorSplinePatch":
        return TensorSplinePatch(self.space, self.control.copy())

    def corner(self, c1: int, c2: int) -> np.ndarray:
        return self.control[-1 if c1 else 0, -1 if c2 else 0]


@dataclass
class ScalarSplineFunction:
    """Scalar function with coefficient table D over a tensor space."""

    space: TensorSplineSpace
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != self.space.shape:
            raise ParameterError("coefficient table does not match space")

    def evaluate(self, xi: Sequence[float], max_deriv: int = 0) -> PatchEvaluation:
        evaluation = _evaluate_table(self.space, self.coefficients[:, :, None], xi, max_deriv)
        return PatchEvaluation(
            evaluation.point[0],
            None if evaluation.jacobian is None else evaluation.jacobian[0],
            None if evaluation.hessian is None else evaluation.hessian[0],
        )


def _evaluate_table(space: TensorSplineSpace, table: np.ndarray, xi: Sequence[float], max_deriv: int) -> PatchEvaluation:
    if not 0 <= max_deriv <= 2:
        raise ParameterError(f"max_deriv must lie in 0..2, got {max_deriv}")
    x1, x2 = float(xi[0]), float(xi[1])
    _check_parameter(x1)
    _check_parameter(x2)
    f1, n1 = eval_basis(space.first, min(max(x1, 0.0), 1.0), max_deriv)
    f2, n2 = eval_basis(space.second, min(max(x2, 0.0), 1.0), max_deriv)
    local = table[f1:f1 + space.first.p + 1, f2:f2 + space.second.p + 1]

    def contract(a: int, b: int) -> np.ndarray:
        return np.einsum("a,b,abd->d", n1[a], n2[b], local)

    point = contract(0, 0)
    jacobian = hessian = None
    if max_deriv >= 1:
        jacobian = np.stack([contract(1, 0), contract(0, 1)], axis=1)
    if max_deriv >= 2:
        mixed = contract(1, 1)
        hessian = np.empty((table.shape[2], 2, 2))
        hessian[:, 0, 0] = contract(2, 0)
        hessian[:, 0, 1] = mixed
        hessian[:, 1, 0] = mixed
        hessian[:, 1, 1] = contract(0, 2)
    return PatchEvaluation(point, jacobian, hessian)


def eval_patch(patch: TensorSplinePatch, xi: Sequence[float], max_deriv: int = 0) -> PatchEvaluation:
    """
    Evaluate a patch and its parametric derivatives.

    Args:
        patch: Tensor-product patch
        xi: Parameter pair (xi1, xi2) in [0, 1]^2
        max_deriv: 0, 1 or 2

    Returns:
        PatchEvaluation: point, Jacobian and Hessian (None when not requested)
    """
    return _evaluate_table(patch.space, patch.control, xi, max_deriv)


def eval_patch_grid(patch: TensorSplinePatch, xs1: np.ndarray, xs2: np.ndarray, max_deriv: int = 0) -> np.ndarray:
    """
    Derivatives of a patch on the tensor grid xs1 x xs2.

    Returns:
        np.ndarray: shape (max_deriv+1, max_deriv+1, len(xs1), len(xs2), d);
        entry [a, b] is the derivative of order a in xi1 and b in xi2
        (only a + b <= max_deriv is filled)
    """
    b1 = collocation_tables(patch.space.first, xs1, max_deriv)
    b2 = collocation_tables(patch.space.second, xs2, max_deriv)
    out = np.zeros((max_deriv + 1, max_deriv + 1, len(xs1), len(xs2), patch.dim))
    for a in range(max_deriv + 1):
        for b in range(max_deriv + 1 - a):
            out[a, b] = np.einsum("ia,jb,abd->ijd", b1[a], b2[b], patch.control)
    return out
