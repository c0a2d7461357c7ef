"""
Linear Solves

Sparse LU factorization with one step of iterative refinement.
"""

import logging
from typing import Union

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from errors import SingularTangentError, SolverError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


def factorize(K: Union[scipy.sparse.spmatrix, np.ndarray]):
    """
    Sparse LU factors of K.

    Raises:
        SingularTangentError: K is exactly singular
    """
    matrix = scipy.sparse.csc_matrix(K)
    if matrix.shape[0] != matrix.shape[1]:
        raise SolverError(f"matrix must be square, got {matrix.shape}")
    try:
        return scipy.sparse.linalg.splu(matrix)
    except RuntimeError as e:
        raise SingularTangentError(f"factorization failed: {e}") from e


def solve_linear(K: Union[scipy.sparse.spmatrix, np.ndarray], F: np.ndarray, tol: float = RESIDUAL_TOL) -> np.ndarray:
    """
    Solve K u = F.

    Raises:
        SingularTangentError: K is singular
        SolverError: backward error above ``tol`` after refinement
    """
    F = np.asarray(F, dtype=float)
    matrix = scipy.sparse.csc_matrix(K)
    norm = np.linalg.norm(F)
    if norm == 0.0:
        return np.zeros(matrix.shape[1])
    lu = factorize(matrix)
    u = lu.solve(F)
    u += lu.solve(F - matrix @ u)
    if not np.all(np.isfinite(u)):
        raise SingularTangentError("linear solve produced non-finite values")
    # normwise backward error
    residual = np.linalg.norm(F - matrix @ u) / (scipy.sparse.linalg.norm(matrix, np.inf) * np.linalg.norm(u) + norm)
    if residual > tol:
        raise SolverError(f"linear solve inaccurate: backward error {residual:.3e} > {tol:.1e}")
    logger.debug(f"Linear solve with {matrix.shape[0]} unknowns, backward error {residual:.2e}")
    return u
