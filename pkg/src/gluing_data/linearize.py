"""
Interface Linearization

Moves the first row of control points next to each failing interface so that
the interface admits linear gluing functions. Interface traces stay fixed and,
for the fitted gluing data, the first-row points move as little as possible.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from errors import DegenerateGluingError, SingularConfigurationError, TopologyError
from multipatch_topology import Edge, MultiPatchSurface, Topology, standard_form_edge
from spline_core import TensorSplinePatch, collocation_matrix, greville_abscissae
from .gluing import (
    DEFAULT_TOL,
    _gluing_matrix,
    _normalize,
    collocation_points,
    interface_tangents,
    remove_common_root,
    split_beta,
    verify_as_g1,
)
from .models import EdgeGluingData, linear, quadratic_bernstein

logger = logging.getLogger(__name__)

G1_TOL = 1e-6


def _check_g1(X: np.ndarray, Y: np.ndarray, T: np.ndarray, g1_tol: float, edge: Optional[Edge]):
    """Transversal and tangent vectors must share a tangent plane."""
    if X.shape[1] < 3:
        return
    volume = np.abs(np.einsum("ij,ij->i", np.cross(X, Y), T))
    scale = np.linalg.norm(X, axis=1) * np.linalg.norm(Y, axis=1) * np.linalg.norm(T, axis=1)
    worst = float(np.max(volume / np.maximum(scale, 1e-300)))
    if worst > g1_tol:
        name = "interface" if edge is None else f"edge {edge.index}"
        raise TopologyError(f"{name} is not G1 (tangent-plane deviation {worst:.3e})")


def _endpoint_exact_fit(X, Y, T, xs, g1_tol: float) -> EdgeGluingData:
    """Gluing data exact at both edge ends and least-squares in between."""
    scale = max(np.abs(X).max(), np.abs(Y).max(), np.abs(T).max(), 1e-300)
    ends = [0, len(xs) - 1]
    A_end = _gluing_matrix(X[ends], Y[ends], T[ends], xs[ends]) / scale
    A = _gluing_matrix(X, Y, T, xs) / scale
    Z = scipy.linalg.null_space(A_end, rcond=g1_tol)
    if Z.shape[1] == 0:
        raise SingularConfigurationError("gluing identity has no solution at the edge ends")
    _, s, vt = np.linalg.svd(A @ Z)
    null_dim = max(1, int(np.sum(s <= DEFAULT_TOL * max(s[0], 1e-300))))
    v = _normalize(Z @ vt[-null_dim:].T)

    alpha1, alpha2 = linear(v[0], v[1]), linear(v[2], v[3])
    beta = quadratic_bernstein(v[4], v[5], v[6])
    alpha1, alpha2, beta = remove_common_root(alpha1, alpha2, beta)
    beta1, beta2 = split_beta(alpha1, alpha2, beta)
    data = EdgeGluingData(alpha1, alpha2, beta1, beta2)
    if not data.alpha_positive():
        raise DegenerateGluingError(f"alpha1 * alpha2 changes sign: {alpha1}, {alpha2}")
    return data


def fit_edge_gluing(P1: TensorSplinePatch, P2: TensorSplinePatch, g1_tol: float = G1_TOL, edge: Optional[Edge] = None) -> EdgeGluingData:
    """
    Linear gluing data for a G1 interface in standard form.

    Raises:
        TopologyError: The patches do not share a tangent plane along the edge
        SingularConfigurationError: No gluing data is exact at the edge ends
    """
    xs = collocation_points(P1)
    X, Y, T = interface_tangents(P1, P2, xs)
    _check_g1(X, Y, T, g1_tol, edge)
    return _endpoint_exact_fit(X, Y, T, xs, g1_tol)


def transversal_maps(P1: TensorSplinePatch, P2: TensorSplinePatch, data: EdgeGluingData):
    """
    Coefficient maps of the transversal derivatives generated by D in S^{p-1,r}.

    Returns (L1, L2, c1, c2) with X = L1 D - c1 and Y = -L2 D - c2 in the
    B-spline coefficients of the geometry space.
    """
    space = P1.space.univariate
    lower = space.lower_degree()
    g = greville_abscissae(space)
    _, _, T = interface_tangents(P1, P2, g)
    N = collocation_matrix(space, g)
    B = collocation_matrix(lower, g)
    L1 = np.linalg.solve(N, data.alpha1(g)[:, None] * B)
    L2 = np.linalg.solve(N, data.alpha2(g)[:, None] * B)
    c1 = np.linalg.solve(N, data.beta1(g)[:, None] * T)
    c2 = np.linalg.solve(N, data.beta2(g)[:, None] * T)
    return L1, L2, c1, c2


def _transversal_fit(P1: TensorSplinePatch, P2: TensorSplinePatch, data: EdgeGluingData) -> Tuple[np.ndarray, np.ndarray]:
    """
    B-spline coefficients (n, d) of the new transversal derivatives.

    Both are generated from one vector field D in S^{p-1,r}:
    X = alpha1 D - beta1 T and Y = -alpha2 D - beta2 T. D minimizes the
    summed squared displacement of the first-row control points on both sides.
    """
    space = P1.space.univariate
    step = space.h / space.p
    L1, L2, c1, c2 = transversal_maps(P1, P2, data)
    X_old = (P1.control[1] - P1.control[0]) / step
    Y_old = (P2.control[:, 1] - P2.control[:, 0]) / step

    # end coefficients follow from the gluing identity at the edge ends
    D = np.zeros((L1.shape[1], X_old.shape[1]))
    D[0] = (X_old[0] + c1[0]) / L1[0, 0]
    D[-1] = (X_old[-1] + c1[-1]) / L1[-1, -1]

    system = np.vstack([L1[1:-1], -L2[1:-1]])
    rhs = np.vstack([X_old[1:-1] + c1[1:-1], Y_old[1:-1] + c2[1:-1]])
    rhs = rhs - system[:, [0]] * D[0] - system[:, [-1]] * D[-1]
    inner = system[:, 1:-1]
    solution, _, rank, _ = np.linalg.lstsq(inner, rhs, rcond=None)
    if rank < inner.shape[1]:
        raise SingularConfigurationError(
            f"transversal least-squares system has rank {rank} < {inner.shape[1]}"
        )
    D[1:-1] = solution
    X_coef = L1 @ D - c1
    Y_coef = -L2 @ D - c2

    # the coefficient maps are exact only if beta * T lies in the geometry space
    lower = space.lower_degree()
    xs = collocation_points(P1)
    _, _, T = interface_tangents(P1, P2, xs)
    Bs = collocation_matrix(space, xs)
    Dx = collocation_matrix(lower, xs) @ D
    X_exact = data.alpha1(xs)[:, None] * Dx - data.beta1(xs)[:, None] * T
    Y_exact = -data.alpha2(xs)[:, None] * Dx - data.beta2(xs)[:, None] * T
    scale = max(np.abs(X_exact).max(), np.abs(Y_exact).max(), 1e-300)
    mismatch = max(np.abs(Bs @ X_coef - X_exact).max(), np.abs(Bs @ Y_coef - Y_exact).max()) / scale
    if mismatch > 1e-9:
        raise SingularConfigurationError(
            f"beta * tangent is not a spline of the geometry space (mismatch {mismatch:.3e})"
        )
    return X_coef, Y_coef


def _linearize_edge(surface: MultiPatchSurface, topology: Topology, edge: Edge, g1_tol: float):
    form = standard_form_edge(topology, edge)
    P1, P2 = form.patches(surface)
    space = P1.space.univariate

    data = fit_edge_gluing(P1, P2, g1_tol, edge)
    X_coef, Y_coef = _transversal_fit(P1, P2, data)

    step = space.h / space.p
    C1 = P1.control.copy()
    C2 = P2.control.copy()
    new_row = C1[0] + step * X_coef
    new_col = C2[:, 0] + step * Y_coef
    size = max(np.abs(C1).max(), np.abs(C2).max(), 1.0)
    for new, old in ((new_row, C1[1]), (new_col, C2[:, 1])):
        if max(np.abs(new[0] - old[0]).max(), np.abs(new[-1] - old[-1]).max()) > 1e-9 * size:
            raise SingularConfigurationError(
                f"edge {edge.index}: linearization would move a point of a neighbouring trace"
            )
    C1[1, 1:-1] = new_row[1:-1]
    C2[1:-1, 1] = new_col[1:-1]

    moved = max(np.abs(C1 - P1.control).max(), np.abs(C2 - P2.control).max())
    logger.debug(f"Edge {edge.index}: first-row points moved by up to {moved:.3e}")
    surface.patches[form.patch1] = TensorSplinePatch(P1.space, form.transform1.inverse().apply(C1))
    surface.patches[form.patch2] = TensorSplinePatch(P2.space, form.transform2.inverse().apply(C2))


def as_g1_linearize(
    surface: MultiPatchSurface,
    topology: Topology,
    tol: float = DEFAULT_TOL,
    g1_tol: float = G1_TOL,
    max_sweeps: int = 5,
) -> MultiPatchSurface:
    """
    Project a G1 surface onto AS-G1 form at its interfaces.

    Args:
        surface: G1 multi-patch surface
        topology: Its topology
        tol: AS-G1 residual tolerance
        g1_tol: Tangent-plane tolerance of the G1 precondition
        max_sweeps: Passes over the failing edges

    Returns:
        MultiPatchSurface: New surface; unchanged copy if already AS-G1

    Raises:
        TopologyError: Surface is not G1 at an interface
        SingularConfigurationError: Least-squares problem is rank-deficient
            or the result still fails the AS-G1 check
    """
    result = surface.copy()
    for sweep in range(max_sweeps):
        report = verify_as_g1(result, topology, tol)
        if report.passed:
            if sweep:
                logger.info(f"AS-G1 linearization converged after {sweep} sweep(s)")
            return result
        for entry in report.failed:
            _linearize_edge(result, topology, topology.edges[entry.edge], g1_tol)

    report = verify_as_g1(result, topology, tol)
    if not report.passed:
        raise SingularConfigurationError(
            f"linearization left {len(report.failed)} edge(s) above tolerance "
            f"(max residual {report.max_residual:.3e})"
        )
    return result
