"""
Uniform refinement of spline spaces and patches.

Knot insertion and degree elevation are both expressed as a prolongation
matrix between nested spaces, obtained by interpolating the coarse basis at
the Greville points of the fine space.
"""

from typing import Optional, Union

import numpy as np
import scipy.linalg

from errors import ParameterError
from .tensor import TensorSplinePatch, TensorSplineSpace
from .univariate import UnivariateSplineSpace, collocation_matrix, greville_abscissae


def prolongation(coarse: UnivariateSplineSpace, fine: UnivariateSplineSpace) -> np.ndarray:
    """
    Matrix P with N_coarse = N_fine @ P, i.e. fine coefficients = P @ coarse coefficients.

    Raises:
        ParameterError: If ``fine`` does not contain ``coarse``
    """
    if not coarse.nests_in(fine):
        raise ParameterError(f"{fine} does not contain {coarse}")
    g = greville_abscissae(fine)
    P = scipy.linalg.solve(collocation_matrix(fine, g), collocation_matrix(coarse, g))
    P[np.abs(P) < 1e-14] = 0.0
    return P


def refined_space(space: UnivariateSplineSpace, insert_knots: int = 0, elevate_degree: int = 0) -> UnivariateSplineSpace:
    """
    Target of a uniform refinement.

    Args:
        space: Source space
        insert_knots: Number of new knots inserted uniformly into every element
        elevate_degree: Degree increase (regularity is kept)
    """
    if insert_knots < 0 or elevate_degree < 0:
        raise ParameterError("refinement counts must be nonnegative")
    return UnivariateSplineSpace(
        space.p + elevate_degree,
        space.r,
        space.k * (insert_knots + 1),
    )


def refine(
    obj: Union[UnivariateSplineSpace, TensorSplinePatch],
    insert_knots: int = 0,
    elevate_degree: int = 0,
    target: Optional[UnivariateSplineSpace] = None,
) -> Union[UnivariateSplineSpace, TensorSplinePatch]:
    """
    Refine a space or a patch; patches keep their point map exactly.

    Args:
        obj: Univariate space or tensor patch
        insert_knots: Knots inserted per element (1 halves h)
        elevate_degree: Degree increase
        target: Explicit target space; overrides the two counts

    Returns:
        Refined space or patch

    Raises:
        ParameterError: Target space does not nest the source
    """
    source = obj if isinstance(obj, UnivariateSplineSpace) else obj.space.univariate
    fine = target if target is not None else refined_space(source, insert_knots, elevate_degree)
    if not source.nests_in(fine):
        raise ParameterError(f"{fine} does not contain {source}")
    if isinstance(obj, UnivariateSplineSpace):
        return fine

    P = prolongation(source, fine)
    control = np.einsum("ia,jb,abd->ijd", P, P, obj.control)
    return TensorSplinePatch(TensorSplineSpace(fine, fine), control)
