"""
Shell Assembler

Element loops over the Bezier elements of every patch, weak boundary
penalties and dead loads. Per-patch contributions live in the tensor
B-spline basis of the patch and are mapped to the C1 space through the
extraction operator, component-major (index c * dim + j).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

import numpy as np
import scipy.sparse

from c1_basis import C1Space
from errors import ParameterError
from spline_core import element_rules, eval_basis, eval_patch, eval_patch_grid
from .kinematics import ElementKinematics, element_basis, fundamental_forms, geometry_tables, normal_rotation
from .models import BoundaryConditionSet, BoundaryKind, EdgeCondition, LoadCase, ShellMaterial
from .state import ShellState, split_components

logger = logging.getLogger(__name__)


class AssemblyKind(str, Enum):
    """What assemble() returns."""
    LINEAR = "linear"       # (K(0), F)
    RESIDUAL = "residual"   # R(u)
    TANGENT = "tangent"     # K(u)


@dataclass
class _Element:
    dofs: np.ndarray        # patch-local scalar indices, (nb,)
    basis: np.ndarray       # (6, nq, nb)
    geometry: np.ndarray    # (6, nq, 3)
    weights: np.ndarray     # quadrature weight times undeformed area element, (nq,)


@dataclass
class _PatchResult:
    force: Optional[np.ndarray]
    rows: Optional[np.ndarray]
    cols: Optional[np.ndarray]
    values: Optional[np.ndarray]
    energy: float


def _element_dofs(first1: int, first2: int, p: int, n: int) -> np.ndarray:
    i = np.arange(first1, first1 + p + 1)
    j = np.arange(first2, first2 + p + 1)
    return (i[:, None] * n + j[None, :]).ravel()


def _vector_dofs(dofs: np.ndarray, n2: int) -> np.ndarray:
    """Element scalar indices to the component-major patch indices r = c*nb + b."""
    return np.concatenate([c * n2 + dofs for c in range(3)])


class ShellModel:
    """
    Discrete Kirchhoff-Love shell over a C1 space.

    Exposes the equilibrium problem the solvers work on:
    R(u, lambda) = F_int(u) + K_bc u - lambda F_ref - F_const.

    Args:
        space: C1 space carrying the displacement
        material: Shell material
        loads: Dead loads; point loads with scaled=False form F_const
        bcs: Weak boundary conditions
        workers: Threads used for the element loop (1 = deterministic serial order)
    """

    def __init__(
        self,
        space: C1Space,
        material: ShellMaterial,
        loads: Optional[LoadCase] = None,
        bcs: Optional[BoundaryConditionSet] = None,
        workers: int = 1,
    ):
        self.space = space
        self.material = material
        self.loads = loads or LoadCase()
        self.bcs = bcs or BoundaryConditionSet()
        self.workers = max(int(workers), 1)

        geometry_degree = space.surface.space.univariate.p
        if geometry_degree > space.p:
            logger.warning(
                f"Geometry degree {geometry_degree} exceeds the analysis degree {space.p}; "
                f"{space.p + 1}-point quadrature under-resolves the geometry"
            )

        self._n2 = space.n * space.n
        self._operators = [self._patch_operator(i) for i in range(len(space.surface))]
        self._elements = [self._prepare_patch(i) for i in range(len(space.surface))]
        self._penalty = self._penalty_matrix()
        self._reference, self._constant = self._load_vectors()
        logger.debug(f"Shell model with {self.n_dofs} unknowns on {len(space.surface)} patches")

    @property
    def n_dofs(self) -> int:
        return 3 * self.space.dimension

    # ------------------------------------------------------------------
    # setup

    def _patch_operator(self, patch: int) -> scipy.sparse.csr_matrix:
        block = self.space.matrix[self.space.patch_rows(patch)]
        return scipy.sparse.kron(scipy.sparse.identity(3), block, format="csr")

    def _prepare_patch(self, patch: int) -> List[_Element]:
        space = self.space.space
        rules = element_rules(space, space.p + 1)
        geometry_patch = self.space.surface[patch]
        elements = []
        for rule1 in rules:
            for rule2 in rules:
                grid = eval_patch_grid(geometry_patch, rule1.points, rule2.points, 2)
                geometry = geometry_tables(grid)
                raw = np.cross(geometry[1], geometry[2])
                area = np.linalg.norm(raw, axis=-1)
                weights = np.outer(rule1.weights, rule2.weights).ravel() * area
                elements.append(_Element(
                    dofs=_element_dofs(rule1.first, rule2.first, space.p, space.dimension),
                    basis=element_basis(rule1.values, rule2.values),
                    geometry=geometry,
                    weights=weights,
                ))
        return elements

    def _side_quadrature(self, condition: EdgeCondition):
        """Points, weights (times ds), basis rows and geometry along one patch side."""
        space = self.space.space
        patch = self.space.surface[condition.patch]
        side = condition.side
        running = 1 - side.axis
        n = space.dimension
        for rule in element_rules(space, space.p + 1):
            for t, w in zip(rule.points, rule.weights):
                xi = side.point(float(t))
                geometry = eval_patch(patch, xi, 1)
                tangent = geometry.jacobian[:, running]
                f1, b1 = eval_basis(space, xi[0], 1)
                f2, b2 = eval_basis(space, xi[1], 1)
                dofs = _element_dofs(f1, f2, space.p, n)
                values = np.stack([
                    np.outer(b1[0], b2[0]).ravel(),
                    np.outer(b1[1], b2[0]).ravel(),
                    np.outer(b1[0], b2[1]).ravel(),
                ])
                yield dofs, values, geometry.jacobian, tangent, w * np.linalg.norm(tangent)

    def _side_length(self, condition: EdgeCondition) -> float:
        return float(sum(weight for *_, weight in self._side_quadrature(condition)))

    def _penalty_matrix(self) -> scipy.sparse.csr_matrix:
        E, t = self.material.youngs_modulus, self.material.thickness
        alpha = self.bcs.penalty
        k = self.space.k
        total = scipy.sparse.csr_matrix((self.n_dofs, self.n_dofs))
        for condition in self.bcs.edges:
            if condition.patch >= len(self.space.surface):
                raise ParameterError(f"boundary condition on missing patch {condition.patch}")
            h = self._side_length(condition) / k
            displacement_scale = alpha * E * t / h
            rotation_scale = alpha * E * t ** 3 / h
            rows, cols, vals = [], [], []
            for dofs, values, jacobian, tangent, weight in self._side_quadrature(condition):
                vdofs = _vector_dofs(dofs, self._n2)
                N = values[0]
                mass = displacement_scale * weight * np.outer(N, N)
                block = np.kron(np.eye(3), mass)
                if condition.kind == BoundaryKind.CLAMPED:
                    normal = np.cross(jacobian[:, 0], jacobian[:, 1])
                    normal /= np.linalg.norm(normal)
                    conormal = np.cross(tangent, normal)
                    conormal /= np.linalg.norm(conormal)
                    contra = jacobian @ np.linalg.inv(jacobian.T @ jacobian)
                    # theta = -sum_a (A^a . nu)(A_3 . u_,a)
                    g = -sum((contra[:, a] @ conormal) * values[1 + a] for a in range(2))
                    rotation = np.concatenate([normal[c] * g for c in range(3)])
                    block = block + rotation_scale * weight * np.outer(rotation, rotation)
                rows.append(np.repeat(vdofs, vdofs.size))
                cols.append(np.tile(vdofs, vdofs.size))
                vals.append(block.ravel())
            size = 3 * self._n2
            local = scipy.sparse.csr_matrix(
                (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
            )
            Q = self._operators[condition.patch]
            total = total + (Q.T @ local @ Q)
            logger.debug(f"{condition.kind.value} penalty on patch {condition.patch} {condition.side.value}, h = {h:.4g}")
        return total.tocsr()

    def _load_vectors(self) -> Tuple[np.ndarray, np.ndarray]:
        reference = np.zeros(self.n_dofs)
        constant = np.zeros(self.n_dofs)
        if self.loads.has_surface_load:
            f = np.asarray(self.loads.surface_load, dtype=float)
            for patch, elements in enumerate(self._elements):
                local = np.zeros(3 * self._n2)
                for element in elements:
                    shape = element.basis[0].T @ element.weights
                    for c in range(3):
                        np.add.at(local, c * self._n2 + element.dofs, f[c] * shape)
                reference += self._operators[patch].T @ local
        space = self.space.space
        for load in self.loads.point_loads:
            if load.patch >= len(self.space.surface):
                raise ParameterError(f"point load on missing patch {load.patch}")
            f1, b1 = eval_basis(space, load.xi[0], 0)
            f2, b2 = eval_basis(space, load.xi[1], 0)
            dofs = _element_dofs(f1, f2, space.p, space.dimension)
            N = np.outer(b1[0], b2[0]).ravel()
            local = np.zeros(3 * self._n2)
            for c in range(3):
                local[c * self._n2 + dofs] += load.force[c] * N
            target = reference if load.scaled else constant
            target += self._operators[load.patch].T @ local
        return reference, constant

    # ------------------------------------------------------------------
    # element loop

    def _patch_contribution(self, patch: int, table: np.ndarray, want_force: bool, want_tangent: bool) -> _PatchResult:
        material = self.material
        tm, tb = material.membrane_factor, material.bending_factor
        n2 = self._n2
        force = np.zeros(3 * n2) if want_force else None
        rows, cols, vals = [], [], []
        energy = 0.0
        flat = table.reshape(n2, 3)
        for element in self._elements[patch]:
            kin = ElementKinematics(element.basis, element.geometry, flat[element.dofs])
            D = material.constitutive(kin.ref_metric)
            n = tm * np.einsum("qij,qj->qi", D, kin.eps)
            m = tb * np.einsum("qij,qj->qi", D, kin.kappa)
            w = element.weights
            energy += 0.5 * float(np.sum(w * (np.einsum("qi,qi->q", n, kin.eps) + np.einsum("qi,qi->q", m, kin.kappa))))
            if not (want_force or want_tangent):
                continue
            eps_r, kappa_r = kin.first_variations()
            vdofs = _vector_dofs(element.dofs, n2)
            if want_force:
                f = np.einsum("qri,qi,q->r", eps_r, n, w) + np.einsum("qri,qi,q->r", kappa_r, m, w)
                np.add.at(force, vdofs, f)
            if want_tangent:
                Ke = (
                    tm * np.einsum("qri,qij,qsj,q->rs", eps_r, D, eps_r, w, optimize=True)
                    + tb * np.einsum("qri,qij,qsj,q->rs", kappa_r, D, kappa_r, w, optimize=True)
                    + np.einsum("qrs,q->rs", kin.membrane_geometric(n) + kin.bending_geometric(m), w)
                )
                rows.append(np.repeat(vdofs, vdofs.size))
                cols.append(np.tile(vdofs, vdofs.size))
                vals.append(Ke.ravel())
        if want_tangent:
            return _PatchResult(force, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), energy)
        return _PatchResult(force, None, None, None, energy)

    def _evaluate(self, u: np.ndarray, want_force: bool, want_tangent: bool) -> List[_PatchResult]:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_dofs,):
            raise ParameterError(f"displacement vector must have length {self.n_dofs}, got {u.shape}")
        tables = self.space.extraction(split_components(u, self.space.dimension))
        patches = range(len(tables))

        def work(i: int) -> _PatchResult:
            return self._patch_contribution(i, tables[i], want_force, want_tangent)

        if self.workers > 1 and len(tables) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                return list(pool.map(work, patches))
        return [work(i) for i in patches]

    # ------------------------------------------------------------------
    # equilibrium problem

    @property
    def reference_load(self) -> np.ndarray:
        """Load vector multiplied by the load factor."""
        return self._reference.copy()

    @property
    def constant_load(self) -> np.ndarray:
        """Load vector independent of the load factor."""
        return self._constant.copy()

    @property
    def penalty_matrix(self) -> scipy.sparse.csr_matrix:
        return self._penalty

    def external_force(self, lam: Optional[float] = None) -> np.ndarray:
        lam = self.loads.load_factor if lam is None else lam
        return lam * self._reference + self._constant

    def internal_force(self, u: np.ndarray) -> np.ndarray:
        """Membrane, bending and penalty forces at u."""
        total = self._penalty @ u
        for patch, result in enumerate(self._evaluate(u, True, False)):
            total = total + self._operators[patch].T @ result.force
        return total

    def tangent(self, u: np.ndarray) -> scipy.sparse.csr_matrix:
        """Symmetric tangent stiffness at u (penalties included)."""
        total = self._penalty.copy()
        size = 3 * self._n2
        for patch, result in enumerate(self._evaluate(u, False, True)):
            local = scipy.sparse.csr_matrix((result.values, (result.rows, result.cols)), shape=(size, size))
            Q = self._operators[patch]
            total = total + Q.T @ local @ Q
        total = total.tocsr()
        return 0.5 * (total + total.T)

    def residual(self, u: np.ndarray, lam: Optional[float] = None) -> np.ndarray:
        return self.internal_force(u) - self.external_force(lam)

    def energy(self, u: np.ndarray, lam: Optional[float] = None) -> float:
        """Total potential energy: strain energy plus penalty energy minus work of the dead loads."""
        u = np.asarray(u, dtype=float)
        strain = sum(result.energy for result in self._evaluate(u, False, False))
        return float(strain + 0.5 * u @ (self._penalty @ u) - self.external_force(lam) @ u)

    def linear_system(self) -> Tuple[scipy.sparse.csr_matrix, np.ndarray]:
        """Stiffness at u = 0 and the load vector at the case load factor."""
        return self.tangent(np.zeros(self.n_dofs)), self.external_force()

    def monitor(self, u: np.ndarray, patch: int, xi: Tuple[float, float]) -> np.ndarray:
        """Displacement vector at a parametric point."""
        return ShellState(self.space, u).displacement(patch, xi)

    def boundary_measures(self, u: np.ndarray, samples: int = 21) -> Tuple[float, float]:
        """Largest displacement and normal rotation sampled on the constrained sides."""
        state = ShellState(self.space, u)
        displacement = rotation = 0.0
        for condition in self.bcs.edges:
            running = 1 - condition.side.axis
            for t in np.linspace(0.0, 1.0, samples):
                xi = condition.side.point(float(t))
                _, du = state.displacement(condition.patch, xi, 1)
                forms = fundamental_forms(state, condition.patch, xi)
                conormal = np.cross(forms.basis[:, running], forms.normal)
                conormal /= np.linalg.norm(conormal)
                displacement = max(displacement, float(np.linalg.norm(state.displacement(condition.patch, xi))))
                if condition.kind == BoundaryKind.CLAMPED:
                    rotation = max(rotation, abs(normal_rotation(forms, du, conormal)))
        return displacement, rotation


def assemble(
    state: ShellState,
    material: ShellMaterial,
    loads: LoadCase,
    bcs: BoundaryConditionSet,
    want: Union[AssemblyKind, str] = AssemblyKind.LINEAR,
    workers: int = 1,
):
    """
    Assemble the discrete shell operators at the displacement of ``state``.

    Args:
        want: LINEAR returns (K, F) at u = 0, RESIDUAL returns R(u),
            TANGENT returns K(u)

    Returns:
        Sparse matrix, vector, or both (see ``want``)
    """
    want = AssemblyKind(want)
    model = ShellModel(state.space, material, loads, bcs, workers)
    if want == AssemblyKind.LINEAR:
        return model.linear_system()
    if want == AssemblyKind.RESIDUAL:
        return model.residual(state.u)
    return model.tangent(state.u)


def strain_energy(state: ShellState, stiffness: scipy.sparse.spmatrix) -> float:
    """B = u^T K u / 2 for the linear stiffness K."""
    u = state.u
    return float(0.5 * u @ (stiffness @ u))
