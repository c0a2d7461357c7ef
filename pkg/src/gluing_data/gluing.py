"""
Gluing Functions

Linear gluing functions alpha and the quadratic beta of an interface in
standard form are the null vector of a collocation matrix of the identity

    alpha1(t) d2P2(t, 0) + alpha2(t) d1P1(0, t) + beta(t) d2P1(0, t) = 0,

sampled at enough Gauss points per element to pin down the spline identity.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from errors import DegenerateGluingError, NotASG1Error
from multipatch_topology import Edge, MultiPatchSurface, Topology, standard_form_edge
from spline_core import TensorSplinePatch, eval_patch_grid
from .models import EdgeGluingData, EdgeReport, GluingReport, linear, quadratic_bernstein

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
ROOT_TOL = 1e-10
RESIDUAL_SAMPLES = 100

# L2 Gram matrix of the linear Bernstein basis on [0, 1]
LINEAR_GRAM = np.array([[1.0 / 3.0, 1.0 / 6.0], [1.0 / 6.0, 1.0 / 3.0]])


def collocation_points(patch: TensorSplinePatch) -> np.ndarray:
    """p + 2 Gauss points per element plus both end points."""
    space = patch.space.univariate
    nodes, _ = np.polynomial.legendre.leggauss(space.p + 2)
    ref = 0.5 * (nodes + 1.0)
    inner = ((np.arange(space.k)[:, None] + ref[None, :]) * space.h).ravel()
    return np.concatenate([[0.0], inner, [1.0]])


def interface_tangents(P1: TensorSplinePatch, P2: TensorSplinePatch, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Transversal and tangential derivatives along an interface in standard form.

    Returns:
        Tuple of arrays (len(xs), d): X = d1P1(0, t), Y = d2P2(t, 0), T = d2P1(0, t)
    """
    g1 = eval_patch_grid(P1, np.array([0.0]), xs, 1)
    g2 = eval_patch_grid(P2, xs, np.array([0.0]), 1)
    X = g1[1, 0, 0]
    T = g1[0, 1, 0]
    Y = g2[0, 1, :, 0]
    return X, Y, T


def _gluing_matrix(X: np.ndarray, Y: np.ndarray, T: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Columns: alpha1 (2 Bernstein), alpha2 (2), beta (3 Bernstein)."""
    s = xs[:, None]
    columns = [
        (1.0 - s) * Y, s * Y,
        (1.0 - s) * X, s * X,
        (1.0 - s) ** 2 * T, 2.0 * s * (1.0 - s) * T, s ** 2 * T,
    ]
    return np.stack([c.ravel() for c in columns], axis=1)


def _normalize(null: np.ndarray) -> np.ndarray:
    """Vector of the null space closest to alpha1 = alpha2 = 1 in L2."""
    ones = np.ones(2)
    Na, Nb = null[0:2], null[2:4]
    Q = Na.T @ LINEAR_GRAM @ Na + Nb.T @ LINEAR_GRAM @ Nb
    g = Na.T @ LINEAR_GRAM @ ones + Nb.T @ LINEAR_GRAM @ ones
    c, *_ = np.linalg.lstsq(Q, g, rcond=None)
    return null @ c


def _linear_root(poly: Polynomial) -> Optional[float]:
    coef = np.append(poly.coef, [0.0, 0.0])
    if abs(coef[1]) <= 1e-14 * max(abs(coef[0]), 1.0):
        return None
    return float(-coef[0] / coef[1])


def remove_common_root(alpha1: Polynomial, alpha2: Polynomial, beta: Polynomial) -> Tuple[Polynomial, Polynomial, Polynomial]:
    """Divide out a linear factor shared by alpha1 and alpha2 (and hence beta)."""
    r1, r2 = _linear_root(alpha1), _linear_root(alpha2)
    if r1 is None or r2 is None or abs(r1 - r2) > ROOT_TOL:
        return alpha1, alpha2, beta
    factor = Polynomial([-r1, 1.0])
    a1, _ = divmod(alpha1, factor)
    a2, _ = divmod(alpha2, factor)
    b, _ = divmod(beta, factor)
    s1, s2 = float(a1.coef[0]), float(a2.coef[0])
    gamma = (s1 + s2) / (s1 * s1 + s2 * s2)
    logger.debug(f"Removed common gluing root at {r1:.6g}")
    return Polynomial([gamma * s1]), Polynomial([gamma * s2]), gamma * b


def _bernstein_linear(poly: Polynomial) -> np.ndarray:
    return np.array([poly(0.0), poly(1.0)])


def _bernstein_quadratic(poly: Polynomial) -> np.ndarray:
    c = np.append(poly.coef, [0.0, 0.0, 0.0])[:3]
    return np.array([c[0], c[0] + 0.5 * c[1], c[0] + c[1] + c[2]])


def split_beta(alpha1: Polynomial, alpha2: Polynomial, beta: Polynomial) -> Tuple[Polynomial, Polynomial]:
    """
    Linear beta1, beta2 of least L2 norm with alpha1*beta2 + alpha2*beta1 = beta.

    Raises:
        DegenerateGluingError: No linear split exists
    """
    a0, a1 = _bernstein_linear(alpha1)
    b0, b1 = _bernstein_linear(alpha2)
    rhs = _bernstein_quadratic(beta)
    # unknowns (u0, u1) of beta1 and (v0, v1) of beta2
    A = np.array([
        [b0, 0.0, a0, 0.0],
        [0.5 * b1, 0.5 * b0, 0.5 * a1, 0.5 * a0],
        [0.0, b1, 0.0, a1],
    ])
    G = np.zeros((4, 4))
    G[:2, :2] = LINEAR_GRAM
    G[2:, 2:] = LINEAR_GRAM
    kkt = np.block([[2.0 * G, A.T], [A, np.zeros((3, 3))]])
    solution, *_ = np.linalg.lstsq(kkt, np.concatenate([np.zeros(4), rhs]), rcond=None)
    x = solution[:4]
    scale = max(np.abs(rhs).max(), np.abs(A).max(), np.abs(A).max() * np.abs(x).max(), 1e-300)
    if np.abs(A @ x - rhs).max() > 1e-9 * scale:
        raise DegenerateGluingError("beta admits no linear split for the given alphas")
    return linear(x[0], x[1]), linear(x[2], x[3])


def gluing_residual(P1: TensorSplinePatch, P2: TensorSplinePatch, data: EdgeGluingData, n_samples: int = RESIDUAL_SAMPLES) -> float:
    """Maximum gluing residual relative to the tangent and alpha magnitudes."""
    xs = np.linspace(0.0, 1.0, n_samples)
    X, Y, T = interface_tangents(P1, P2, xs)
    residual = data.alpha1(xs)[:, None] * Y + data.alpha2(xs)[:, None] * X + data.beta(xs)[:, None] * T
    tangent = max(np.linalg.norm(X, axis=1).max(), np.linalg.norm(Y, axis=1).max(), np.linalg.norm(T, axis=1).max())
    alpha = max(np.abs(data.alpha1(xs)).max(), np.abs(data.alpha2(xs)).max(), 1.0)
    return float(np.linalg.norm(residual, axis=1).max() / max(tangent * alpha, 1e-300))


def fit_standard_pair(P1: TensorSplinePatch, P2: TensorSplinePatch, tol: float = DEFAULT_TOL) -> Tuple[EdgeGluingData, int]:
    """
    Best-fitting gluing data of two patches in standard form.

    Returns:
        Tuple[EdgeGluingData, int]: The data (residual filled in) and the
        dimension of the numerical null space (0 if the fit is inexact)
    """
    xs = collocation_points(P1)
    X, Y, T = interface_tangents(P1, P2, xs)
    scale = max(np.abs(X).max(), np.abs(Y).max(), np.abs(T).max(), 1e-300)
    A = _gluing_matrix(X, Y, T, xs) / scale
    _, s, vt = np.linalg.svd(A, full_matrices=True)
    s_full = np.zeros(7)
    s_full[:len(s)] = s
    null_dim = int(np.sum(s_full <= tol * max(s_full[0], 1e-300)))
    basis = vt[-max(null_dim, 1):].T
    v = _normalize(basis)

    alpha1, alpha2 = linear(v[0], v[1]), linear(v[2], v[3])
    beta = quadratic_bernstein(v[4], v[5], v[6])
    alpha1, alpha2, beta = remove_common_root(alpha1, alpha2, beta)
    beta1, beta2 = split_beta(alpha1, alpha2, beta)
    data = EdgeGluingData(alpha1, alpha2, beta1, beta2)
    data.residual = gluing_residual(P1, P2, data)
    return data, null_dim


def glue_standard_pair(P1: TensorSplinePatch, P2: TensorSplinePatch, tol: float = DEFAULT_TOL) -> EdgeGluingData:
    """
    Gluing data of two patches already in standard form, P1(0, t) = P2(t, 0).

    Raises:
        NotASG1Error: No linear alphas satisfy the gluing identity
        DegenerateGluingError: alpha1 * alpha2 is not positive on [0, 1]
    """
    data, null_dim = fit_standard_pair(P1, P2, tol)
    if null_dim == 0 or data.residual > tol:
        raise NotASG1Error(
            f"no linear gluing functions (relative residual {data.residual:.3e})",
            residual=data.residual,
        )
    if not data.alpha_positive():
        raise DegenerateGluingError(
            f"alpha1 * alpha2 changes sign: alpha1 = {data.alpha1}, alpha2 = {data.alpha2}"
        )
    return data


def compute_gluing(surface: MultiPatchSurface, topology: Topology, edge: Edge, tol: float = DEFAULT_TOL) -> EdgeGluingData:
    """
    Gluing data of one edge; boundary edges carry alpha = 1, beta = 0.

    Args:
        surface: Multi-patch surface
        topology: Its topology
        edge: Edge of the topology
        tol: Relative residual tolerance

    Returns:
        EdgeGluingData: alpha1, alpha2, beta1, beta2 of the edge standard form
    """
    if edge.is_boundary:
        return EdgeGluingData.boundary(edge.index)
    form = standard_form_edge(topology, edge)
    P1, P2 = form.patches(surface)
    try:
        data = glue_standard_pair(P1, P2, tol)
    except NotASG1Error as e:
        raise NotASG1Error(f"edge {edge.index}: {e}", residual=e.residual) from e
    except DegenerateGluingError as e:
        raise DegenerateGluingError(f"edge {edge.index}: {e}") from e
    data.edge = edge.index
    return data


def compute_all_gluing(surface: MultiPatchSurface, topology: Topology, tol: float = DEFAULT_TOL, workers: int = 1) -> List[EdgeGluingData]:
    """Gluing data of every edge, indexed like topology.edges."""
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda e: compute_gluing(surface, topology, e, tol), topology.edges))
    return [compute_gluing(surface, topology, edge, tol) for edge in topology.edges]


def verify_as_g1(surface: MultiPatchSurface, topology: Topology, tol: float = DEFAULT_TOL) -> GluingReport:
    """
    Check every edge for the AS-G1 property without raising.

    Returns:
        GluingReport: One entry per edge of the topology
    """
    report = GluingReport(tolerance=tol)
    for edge in topology.edges:
        if edge.is_boundary:
            report.edges.append(EdgeReport(
                edge=edge.index, interface=False, residual=0.0,
                alpha_positive=True, linear=True, passed=True,
            ))
            continue
        P1, P2 = standard_form_edge(topology, edge).patches(surface)
        try:
            data, null_dim = fit_standard_pair(P1, P2, tol)
        except DegenerateGluingError as e:
            report.edges.append(EdgeReport(
                edge=edge.index, interface=True, residual=float("inf"),
                alpha_positive=False, linear=False, passed=False, message=str(e),
            ))
            continue
        linear_ok = null_dim > 0 and data.residual <= tol
        positive = data.alpha_positive()
        message = ""
        if not linear_ok:
            message = f"residual {data.residual:.3e} exceeds {tol:.1e}"
        elif not positive:
            message = "alpha1 * alpha2 changes sign"
        report.edges.append(EdgeReport(
            edge=edge.index, interface=True, residual=data.residual,
            alpha_positive=positive, linear=linear_ok, passed=linear_ok and positive, message=message,
        ))
        if message:
            logger.debug(f"Edge {edge.index} is not AS-G1: {message}")
    return report
