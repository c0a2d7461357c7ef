"""
C1 Space

Enumerates the basis of the C1 space, assembles the sparse extraction
operator to per-patch B-spline coefficients and evaluates global functions.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from errors import ConstructionError, NotASG1Error, ParameterError
from gluing_data import EdgeGluingData, compute_all_gluing, verify_as_g1
from multipatch_topology import MultiPatchSurface, Topology
from spline_core import (
    PatchEvaluation,
    ScalarSplineFunction,
    TensorSplineSpace,
    UnivariateSplineSpace,
    collocation_matrix,
    eval_patch_grid,
    prolongation,
)
from .construction import C1Construction, VERTEX_INDICES, edge_indices, patch_indices
from .models import BasisKind, C1BasisFunction

logger = logging.getLogger(__name__)


def check_parameters(p: int, r: int, k: int):
    """
    Raises:
        ParameterError: p < 3, r outside 1..p-2 or k below (4 - r) / (p - r - 1)
    """
    if p < 3:
        raise ParameterError(f"degree p must be >= 3, got {p}")
    if not 1 <= r <= p - 2:
        raise ParameterError(f"regularity r must lie in 1..{p - 2}, got {r}")
    if k * (p - r - 1) < 4 - r:
        raise ParameterError(f"k = {k} is below the bound (4 - r)/(p - r - 1) = {(4 - r) / (p - r - 1):.3g}")


def expected_dimension(topology: Topology, space: UnivariateSplineSpace) -> int:
    """Sum of (n-4)^2 per patch, (n0-6)+(n1-4) per edge and 6 per vertex."""
    n, n0, n1 = space.dimension, space.n0, space.n1
    return (
        topology.n_patches * (n - 4) ** 2
        + len(topology.edges) * ((n0 - 6) + (n1 - 4))
        + 6 * len(topology.vertices)
    )


@dataclass
class C1Space:
    """C1 space over a multi-patch surface with its extraction operator."""

    surface: MultiPatchSurface
    topology: Topology
    gluing: List[EdgeGluingData]
    space: UnivariateSplineSpace
    functions: List[C1BasisFunction]
    matrix: scipy.sparse.csr_matrix   # (n_patches * n * n, dim)

    @property
    def p(self) -> int:
        return self.space.p

    @property
    def r(self) -> int:
        return self.space.r

    @property
    def k(self) -> int:
        return self.space.k

    @property
    def n(self) -> int:
        return self.space.dimension

    @property
    def dimension(self) -> int:
        return len(self.functions)

    @property
    def tensor_space(self) -> TensorSplineSpace:
        return TensorSplineSpace(self.space, self.space)

    def offsets(self, kind: BasisKind) -> List[int]:
        return [i for i, f in enumerate(self.functions) if f.kind == kind]

    def patch_rows(self, patch: int) -> slice:
        size = self.n * self.n
        return slice(patch * size, (patch + 1) * size)

    def extraction(self, coefficients: np.ndarray) -> List[np.ndarray]:
        """
        Per-patch coefficient tables of a global function.

        Raises:
            ParameterError: Wrong coefficient vector length
        """
        coefficients = np.asarray(coefficients, dtype=float)
        if coefficients.shape[0] != self.dimension:
            raise ParameterError(f"expected {self.dimension} coefficients, got {coefficients.shape[0]}")
        flat = self.matrix @ coefficients
        return list(flat.reshape((len(self.surface), self.n, self.n) + coefficients.shape[1:]))

    def evaluate(self, coefficients: np.ndarray, patch: int, xi: Tuple[float, float], max_deriv: int = 0) -> PatchEvaluation:
        """Value and parametric derivatives of a global function on one patch."""
        table = self.extraction(coefficients)[patch]
        return ScalarSplineFunction(self.tensor_space, table).evaluate(xi, max_deriv)

    def sample_matrix(self, patch: int, xs1: np.ndarray, xs2: np.ndarray) -> scipy.sparse.csr_matrix:
        """Values of every basis function at the tensor grid xs1 x xs2 of a patch."""
        b1 = collocation_matrix(self.space, xs1)
        b2 = collocation_matrix(self.space, xs2)
        block = self.matrix[self.patch_rows(patch)]
        return scipy.sparse.csr_matrix(scipy.sparse.kron(b1, b2) @ block)

    def least_squares_fit(self, func: Callable[[np.ndarray], np.ndarray], n_points: Optional[int] = None) -> Tuple[np.ndarray, float]:
        """
        Least-squares approximation of a function of the physical point.

        Args:
            func: Maps an (m, 3) array of points to m values
            n_points: Samples per parametric direction and patch

        Returns:
            Tuple[np.ndarray, float]: Coefficients and maximum sample residual
        """
        n_points = n_points or 2 * self.n
        xs = np.linspace(0.0, 1.0, n_points)
        blocks, values = [], []
        for i, patch in enumerate(self.surface.patches):
            points = eval_patch_grid(patch, xs, xs, 0)[0, 0].reshape(-1, 3)
            blocks.append(self.sample_matrix(i, xs, xs))
            values.append(np.asarray(func(points), dtype=float))
        A = scipy.sparse.vstack(blocks).tocsc()
        b = np.concatenate(values)
        normal = (A.T @ A).tocsc()
        coefficients = scipy.sparse.linalg.splu(normal).solve(A.T @ b)
        residual = float(np.abs(A @ coefficients - b).max())
        return coefficients, residual

    def summary(self) -> dict:
        counts = {kind.value: len(self.offsets(kind)) for kind in BasisKind}
        return {"p": self.p, "r": self.r, "k": self.k, "dimension": self.dimension, **counts}


def _extraction_matrix(functions: List[C1BasisFunction], n_patches: int, n: int) -> scipy.sparse.csr_matrix:
    rows, cols, vals = [], [], []
    size = n * n
    for column, function in enumerate(functions):
        for patch, table in function.tables.items():
            nz = np.flatnonzero(table)
            rows.append(patch * size + nz)
            cols.append(np.full(nz.size, column))
            vals.append(table.ravel()[nz])
    if not rows:
        return scipy.sparse.csr_matrix((n_patches * size, 0))
    return scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_patches * size, len(functions)),
    )


def build_c1_space(
    surface: MultiPatchSurface,
    topology: Topology,
    gluing: Optional[List[EdgeGluingData]],
    p: int,
    r: int,
    k: int,
    tol: float = 1e-10,
    workers: int = 1,
) -> C1Space:
    """
    Build the C1 space of degree p, regularity r and k elements per direction.

    Args:
        surface: AS-G1 multi-patch surface
        topology: Its topology
        gluing: Gluing data per edge (computed when None)
        p, r, k: Discretisation parameters of the analysis space
        tol: AS-G1 tolerance used when gluing data is computed here
        workers: Threads used for the per-entity construction

    Returns:
        C1Space: Basis ordered patches, edges (j2 outer), vertices

    Raises:
        ParameterError: Parameters outside the admissible range
        ConstructionError: Surface is not AS-G1
    """
    check_parameters(p, r, k)
    space = UnivariateSplineSpace(p, r, k)
    geometry = surface.space.univariate
    if not geometry.nests_in(space):
        logger.info(f"Geometry space {geometry} is not contained in the analysis space {space}")

    if gluing is None:
        report = verify_as_g1(surface, topology, tol)
        if not report.passed:
            worst = max(report.failed, key=lambda e: e.residual)
            raise ConstructionError(
                f"surface is not AS-G1: {len(report.failed)} edge(s) fail, "
                f"edge {worst.edge} residual {worst.residual:.3e}"
            )
        try:
            gluing = compute_all_gluing(surface, topology, tol)
        except NotASG1Error as e:
            raise ConstructionError(str(e)) from e
    if len(gluing) != len(topology.edges):
        raise ConstructionError(f"expected gluing data for {len(topology.edges)} edges, got {len(gluing)}")

    builder = C1Construction(surface, topology, gluing, space)
    tasks = (
        [(builder.patch_functions, i) for i in range(topology.n_patches)]
        + [(builder.edge_functions, edge.index) for edge in topology.edges]
        + [(builder.vertex_functions, vertex.index) for vertex in topology.vertices]
    )
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda task: task[0](task[1]), tasks))
    else:
        batches = [make(entity) for make, entity in tasks]
    functions = [function for batch in batches for function in batch]

    expected = expected_dimension(topology, space)
    if len(functions) != expected:
        raise ConstructionError(f"enumerated {len(functions)} functions, dimension formula gives {expected}")

    matrix = _extraction_matrix(functions, topology.n_patches, space.dimension)
    logger.info(
        f"C1 space {space}: {len(functions)} functions "
        f"({topology.n_patches * len(patch_indices(space))} patch, "
        f"{len(topology.edges) * len(edge_indices(space))} edge, "
        f"{len(topology.vertices) * len(VERTEX_INDICES)} vertex)"
    )
    return C1Space(surface, topology, gluing, space, functions, matrix)


def prolongation_matrix(coarse: C1Space, fine: C1Space, tol: float = 1e-10) -> scipy.sparse.csr_matrix:
    """
    Matrix mapping coarse C1 coefficients to fine C1 coefficients.

    Raises:
        ParameterError: The coarse space is not contained in the fine space
    """
    P1 = prolongation(coarse.space, fine.space)
    tensor = scipy.sparse.csr_matrix(np.kron(P1, P1))
    blocks = scipy.sparse.block_diag([tensor] * len(coarse.surface), format="csr")
    target = (blocks @ coarse.matrix).tocsc()

    A = fine.matrix.tocsc()
    normal = (A.T @ A).tocsc()
    lu = scipy.sparse.linalg.splu(normal)
    rhs = (A.T @ target).toarray()
    P = lu.solve(rhs)
    mismatch = np.abs(A @ P - target.toarray()).max()
    if mismatch > tol * max(np.abs(target.toarray()).max(), 1.0):
        raise ParameterError(f"coarse space does not embed into the fine space (mismatch {mismatch:.3e})")
    P[np.abs(P) < 1e-14] = 0.0
    return scipy.sparse.csr_matrix(P)
