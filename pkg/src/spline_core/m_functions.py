"""
Boundary M Functions

Linear combinations of the first B-splines of S^{p,r}, S^{p-1,r} and
S^{p,r+1} whose derivatives at 0 form a Kronecker pattern. The C1 edge and
vertex functions are assembled from them.
"""

from enum import Enum
from typing import Sequence

import numpy as np

from errors import ParameterError
from .univariate import UnivariateSplineSpace, collocation_tables, eval_basis


class MFamily(str, Enum):
    """Spline space hosting an M function."""
    BASE = "p,r"
    LOWER_DEGREE = "p-1,r"
    HIGHER_REGULARITY = "p,r+1"


def family_space(space: UnivariateSplineSpace, family: MFamily) -> UnivariateSplineSpace:
    if family == MFamily.BASE:
        return space
    if family == MFamily.LOWER_DEGREE:
        return space.lower_degree()
    return space.raise_regularity()


def m_coefficients(space: UnivariateSplineSpace, family: MFamily, index: int) -> np.ndarray:
    """
    B-spline coefficients of M_index in its family space.

    M_1 of S^{p-1,r} is h/p times its second B-spline, so its first derivative
    at 0 is (p-1)/p.
    """
    family = MFamily(family)
    host = family_space(space, family)
    p, h = space.p, space.h
    coeffs = np.zeros(host.dimension)

    if family in (MFamily.BASE, MFamily.LOWER_DEGREE):
        if index == 0:
            coeffs[:2] = 1.0
        elif index == 1:
            coeffs[1] = h / p
        else:
            raise ParameterError(f"M^{family.value} index must be 0 or 1, got {index}")
        return coeffs

    if space.r > p - 2:
        raise ParameterError("S^{p,r+1} requires r <= p-2")
    near_top = space.r == p - 2
    mu = 2.0 if near_top else 1.0
    if index == 0:
        coeffs[:3] = 1.0
    elif index == 1:
        for j in (1, 2):
            theta = 2 * j - 1 if near_top else j
            coeffs[j] = h / p * theta
    elif index == 2:
        coeffs[2] = h * h * mu / (p * (p - 1))
    else:
        raise ParameterError(f"M^{family.value} index must be 0, 1 or 2, got {index}")
    return coeffs


def m_function(space: UnivariateSplineSpace, family: MFamily, index: int, xi: float, deriv: int = 0) -> float:
    """
    Evaluate an M function or one of its first two derivatives.

    Args:
        space: The base space S^{p,r}
        family: Host space of the M function
        index: 0..1 (0..2 for S^{p,r+1})
        xi: Parameter in [0, 1]
        deriv: Derivative order 0..2

    Returns:
        float: Value of the derivative of order ``deriv`` at xi
    """
    if not 0 <= deriv <= 2:
        raise ParameterError(f"deriv must lie in 0..2, got {deriv}")
    coeffs = m_coefficients(space, family, index)
    host = family_space(space, MFamily(family))
    first, table = eval_basis(host, xi, deriv)
    return float(table[deriv] @ coeffs[first:first + host.p + 1])


def m_table(space: UnivariateSplineSpace, family: MFamily, index: int, points: Sequence[float], max_deriv: int = 1) -> np.ndarray:
    """Values of M_index and its derivatives at many points, shape (max_deriv+1, len(points))."""
    host = family_space(space, MFamily(family))
    tables = collocation_tables(host, points, max_deriv)
    return tables @ m_coefficients(space, family, index)
