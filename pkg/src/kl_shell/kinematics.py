"""
Shell Kinematics

Fundamental forms, Green-Lagrange membrane strains and curvature changes,
and their first and second variations with respect to the displacement
coefficients of one element. Voigt order is [11, 22, 12] with the shear
entries of strains and curvature changes doubled.
"""

from typing import NamedTuple, Tuple

import numpy as np

from errors import SingularGeometryError
from spline_core import eval_patch
from .state import ShellState

UNDEFORMED = "undeformed"
DEFORMED = "deformed"
SHEAR_WEIGHTS = np.array([1.0, 1.0, 2.0])


class FundamentalForms(NamedTuple):
    """First and second fundamental forms with the normal and covariant basis."""

    metric: np.ndarray      # a_{ab}, 2 x 2
    curvature: np.ndarray   # b_{ab}, 2 x 2
    normal: np.ndarray      # a_3
    basis: np.ndarray       # columns a_1, a_2 (3 x 2)


def _forms(jacobian: np.ndarray, hessian: np.ndarray) -> FundamentalForms:
    a1, a2 = jacobian[:, 0], jacobian[:, 1]
    cross = np.cross(a1, a2)
    area = np.linalg.norm(cross)
    if area <= 1e-14 * max(np.linalg.norm(a1) * np.linalg.norm(a2), 1e-300):
        raise SingularGeometryError("degenerate tangent vectors (a1 x a2 = 0)")
    a3 = cross / area
    metric = jacobian.T @ jacobian
    curvature = np.einsum("dab,d->ab", hessian, a3)
    return FundamentalForms(metric, curvature, a3, jacobian)


def fundamental_forms(state: ShellState, patch: int, xi: Tuple[float, float], configuration: str = UNDEFORMED) -> FundamentalForms:
    """
    Fundamental forms of the undeformed or deformed surface at a point.

    Raises:
        SingularGeometryError: a1 x a2 vanishes at the point
    """
    geometry = eval_patch(state.space.surface[patch], xi, 2)
    jacobian, hessian = geometry.jacobian, geometry.hessian
    if configuration == DEFORMED:
        _, du, ddu = state.displacement(patch, xi, 2)
        jacobian = jacobian + du
        hessian = hessian + ddu
    elif configuration != UNDEFORMED:
        raise ValueError(f"unknown configuration '{configuration}'")
    return _forms(jacobian, hessian)


def strains(state: ShellState, patch: int, xi: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Membrane strain and curvature change tensors at a point.

    Returns:
        Tuple[np.ndarray, np.ndarray]: eps = (a - A)/2 and kappa = b - B, both 2 x 2
    """
    ref = fundamental_forms(state, patch, xi, UNDEFORMED)
    cur = fundamental_forms(state, patch, xi, DEFORMED)
    return 0.5 * (cur.metric - ref.metric), cur.curvature - ref.curvature


def _spread(values: np.ndarray) -> np.ndarray:
    """(nq, nb) scalar derivative table to (nq, 3 nb, 3) vector variations, r = c*nb + i."""
    nq, nb = values.shape
    out = np.zeros((nq, 3, nb, 3))
    for c in range(3):
        out[:, c, :, c] = values
    return out.reshape(nq, 3 * nb, 3)


def _unit_normal(a1: np.ndarray, a2: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    raw = np.cross(a1, a2)
    jbar = np.linalg.norm(raw, axis=-1)
    if np.any(jbar <= 1e-14 * np.linalg.norm(a1, axis=-1) * np.linalg.norm(a2, axis=-1)):
        raise SingularGeometryError("degenerate tangent vectors at a quadrature point")
    return raw, jbar, raw / jbar[:, None]


class ElementKinematics:
    """
    Strains and their variations at the quadrature points of one element.

    Args:
        basis: (6, nq, nb) basis tables [N, N_1, N_2, N_11, N_22, N_12]
        geometry: (6, nq, 3) undeformed [X, X_1, X_2, X_11, X_22, X_12]
        displacement: (nb, 3) element displacement coefficients
    """

    def __init__(self, basis: np.ndarray, geometry: np.ndarray, displacement: np.ndarray):
        self.basis = basis
        du = np.einsum("kqi,ic->kqc", basis[1:], displacement)
        ref = geometry[1:]
        cur = ref + du

        A1, A2 = ref[0], ref[1]
        _, self.area, A3 = _unit_normal(A1, A2)
        self.ref_metric = np.stack([
            np.stack([np.einsum("qd,qd->q", A1, A1), np.einsum("qd,qd->q", A1, A2)], -1),
            np.stack([np.einsum("qd,qd->q", A2, A1), np.einsum("qd,qd->q", A2, A2)], -1),
        ], -2)
        self.ref_normal = A3
        self.ref_basis = (A1, A2)
        ref_b = np.stack([np.einsum("qd,qd->q", ref[k], A3) for k in (2, 3, 4)], -1)

        a1, a2 = cur[0], cur[1]
        self.a1, self.a2 = a1, a2
        self.second = (cur[2], cur[3], cur[4])
        self.raw_normal, self.jbar, self.a3 = _unit_normal(a1, a2)
        cur_b = np.stack([np.einsum("qd,qd->q", cur[k], self.a3) for k in (2, 3, 4)], -1)

        cur_metric = np.stack([
            np.einsum("qd,qd->q", a1, a1),
            np.einsum("qd,qd->q", a2, a2),
            np.einsum("qd,qd->q", a1, a2),
        ], -1)
        ref_voigt = np.stack([self.ref_metric[:, 0, 0], self.ref_metric[:, 1, 1], self.ref_metric[:, 0, 1]], -1)
        self.eps = 0.5 * (cur_metric - ref_voigt) * SHEAR_WEIGHTS
        self.kappa = (cur_b - ref_b) * SHEAR_WEIGHTS

    def first_variations(self) -> Tuple[np.ndarray, np.ndarray]:
        """eps_r and kappa_r, each (nq, m, 3)."""
        N = self.basis
        a1r, a2r = _spread(N[1]), _spread(N[2])
        self.a1r, self.a2r = a1r, a2r
        eps_r = np.stack([
            np.einsum("qrd,qd->qr", a1r, self.a1),
            np.einsum("qrd,qd->qr", a2r, self.a2),
            np.einsum("qrd,qd->qr", a1r, self.a2) + np.einsum("qrd,qd->qr", a2r, self.a1),
        ], -1)

        raw_r = np.cross(a1r, self.a2[:, None, :]) + np.cross(self.a1[:, None, :], a2r)
        self.raw_r = raw_r
        self.jbar_r = np.einsum("qrd,qd->qr", raw_r, self.a3)
        self.a3r = (raw_r - self.a3[:, None, :] * self.jbar_r[..., None]) / self.jbar[:, None, None]

        self.a_abr = [_spread(N[k]) for k in (3, 4, 5)]
        kappa_r = np.stack([
            np.einsum("qrd,qd->qr", self.a_abr[k], self.a3) + np.einsum("qd,qrd->qr", self.second[k], self.a3r)
            for k in range(3)
        ], -1) * SHEAR_WEIGHTS
        return eps_r, kappa_r

    def membrane_geometric(self, n: np.ndarray) -> np.ndarray:
        """sum_v n_v eps_v,rs, shape (nq, m, m); requires first_variations()."""
        N1, N2 = self.basis[1], self.basis[2]
        G = (
            n[:, 0, None, None] * np.einsum("qi,qj->qij", N1, N1)
            + n[:, 1, None, None] * np.einsum("qi,qj->qij", N2, N2)
            + n[:, 2, None, None] * (np.einsum("qi,qj->qij", N1, N2) + np.einsum("qi,qj->qij", N2, N1))
        )
        nq, nb, _ = G.shape
        out = np.zeros((nq, 3, nb, 3, nb))
        for c in range(3):
            out[:, c, :, c, :] = G
        return out.reshape(nq, 3 * nb, 3 * nb)

    def bending_geometric(self, m: np.ndarray) -> np.ndarray:
        """sum_v m_v kappa_v,rs, shape (nq, m, m); requires first_variations()."""
        weights = m * SHEAR_WEIGHTS
        S = sum(weights[:, k, None] * self.second[k] for k in range(3))
        S_r = sum(weights[:, k, None, None] * self.a_abr[k] for k in range(3))

        raw_rs = (
            np.cross(self.a1r[:, :, None, :], self.a2r[:, None, :, :])
            + np.cross(self.a1r[:, None, :, :], self.a2r[:, :, None, :])
        )
        j = self.jbar[:, None, None]
        jr = self.jbar_r
        j_rs = (
            np.einsum("qrd,qsd->qrs", self.raw_r, self.raw_r)
            + np.einsum("qd,qrsd->qrs", self.raw_normal, raw_rs)
        ) / j - jr[:, :, None] * jr[:, None, :] / j
        a3rs = (
            raw_rs / j[..., None]
            - (self.raw_r[:, :, None, :] * jr[:, None, :, None] + self.raw_r[:, None, :, :] * jr[:, :, None, None]) / (j ** 2)[..., None]
            - self.raw_normal[:, None, None, :] * (j_rs / j ** 2 - 2.0 * jr[:, :, None] * jr[:, None, :] / j ** 3)[..., None]
        )
        b_rs = (
            np.einsum("qrd,qsd->qrs", S_r, self.a3r)
            + np.einsum("qsd,qrd->qrs", S_r, self.a3r)
            + np.einsum("qd,qrsd->qrs", S, a3rs)
        )
        return b_rs


def element_basis(values1: np.ndarray, values2: np.ndarray) -> np.ndarray:
    """
    Tensor basis tables from univariate element tables.

    Args:
        values1, values2: (3, nq, p+1) derivative tables in each direction

    Returns:
        np.ndarray: (6, nq1*nq2, (p+1)^2) for [N, N_1, N_2, N_11, N_22, N_12]
    """
    pairs = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
    tables = []
    for a, b in pairs:
        t = np.einsum("xi,yj->xyij", values1[a], values2[b])
        nx, ny, ni, nj = t.shape
        tables.append(t.reshape(nx * ny, ni * nj))
    return np.stack(tables)


def geometry_tables(grid: np.ndarray) -> np.ndarray:
    """(3, 3, n1, n2, 3) derivative grid to (6, n1*n2, 3) tables like element_basis."""
    pairs = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)]
    return np.stack([grid[a, b].reshape(-1, grid.shape[-1]) for a, b in pairs])


def contravariant_basis(forms: FundamentalForms) -> np.ndarray:
    """Columns a^1, a^2 with a^a . a_b = delta."""
    return forms.basis @ np.linalg.inv(forms.metric)


def normal_rotation(forms: FundamentalForms, du: np.ndarray, conormal: np.ndarray) -> float:
    """Linearised rotation of the normal about the boundary tangent."""
    contra = contravariant_basis(forms)
    return float(-sum((contra[:, a] @ conormal) * (forms.normal @ du[:, a]) for a in range(2)))
