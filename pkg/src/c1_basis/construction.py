"""
C1 Basis Construction

Patch, edge and vertex functions of the C1 space. Edge and vertex functions
are built on patches in standard form as sums of separable products of
univariate splines; each factor is interpolated exactly at the Greville
points of S^{p,r}, then the table is mapped back to the patch's own
parameterisation.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from errors import ParameterError, TopologyError
from gluing_data import EdgeGluingData, glue_standard_pair
from multipatch_topology import (
    MultiPatchSurface,
    ParamTransform,
    Topology,
    standard_form_edge,
    standard_form_vertex,
)
from spline_core import (
    MFamily,
    UnivariateSplineSpace,
    collocation_matrix,
    collocation_tables,
    eval_patch,
    greville_abscissae,
    m_coefficients,
    m_table,
)
from .models import BasisKind, C1BasisFunction

logger = logging.getLogger(__name__)

VERTEX_INDICES: List[Tuple[int, int]] = [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


def edge_indices(space: UnivariateSplineSpace) -> List[Tuple[int, int]]:
    """(j1, j2) of the edge functions, j2 outer and j1 inner."""
    first = [(j1, 0) for j1 in range(3, space.n0 - 3)]
    second = [(j1, 1) for j1 in range(2, space.n1 - 2)]
    return first + second


def patch_indices(space: UnivariateSplineSpace) -> List[Tuple[int, int]]:
    n = space.dimension
    return [(j1, j2) for j1 in range(2, n - 2) for j2 in range(2, n - 2)]


class UnivariateTables:
    """Greville interpolation and M-function samples of one analysis space."""

    def __init__(self, space: UnivariateSplineSpace):
        self.space = space
        self.n = space.dimension
        self.greville = greville_abscissae(space)
        self._lu = scipy.linalg.lu_factor(collocation_matrix(space, self.greville))
        self.higher = collocation_tables(space.raise_regularity(), self.greville, 1)
        self.lower = collocation_matrix(space.lower_degree(), self.greville)
        self.m_base = [m_coefficients(space, MFamily.BASE, w) for w in (0, 1)]
        self.m_higher = [m_table(space, MFamily.HIGHER_REGULARITY, w, self.greville, 1) for w in (0, 1, 2)]
        # vertex jets need unit slope at 0 from M_1 of S^{p-1,r}
        lower_scale = (1.0, space.p / (space.p - 1))
        self.m_lower = [
            lower_scale[w] * m_table(space, MFamily.LOWER_DEGREE, w, self.greville, 0)[0] for w in (0, 1)
        ]

    def interpolate(self, values: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve(self._lu, values)


def _prune(table: np.ndarray) -> np.ndarray:
    table = np.array(table, dtype=float)
    table[np.abs(table) < 1e-14 * max(np.abs(table).max(), 1.0)] = 0.0
    return table


def _kronecker_row(j: Tuple[int, int]) -> np.ndarray:
    j1, j2 = j
    return np.array([float(j1 == 1 and j2 == 0), float(j1 == 0 and j2 == 1)])


def _kronecker_hessian(j: Tuple[int, int]) -> np.ndarray:
    j1, j2 = j
    mixed = float(j1 == 1 and j2 == 1)
    return np.array([[float(j1 == 2 and j2 == 0), mixed], [mixed, float(j1 == 0 and j2 == 2)]])


@dataclass
class FanEdgeJet:
    """Tangent t and transversal d of a fan edge with first derivatives at the vertex."""
    t0: np.ndarray
    t1: np.ndarray
    d0: np.ndarray
    d1: np.ndarray

    def coefficients(self, j: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        """Trace coefficients d_(0,w), w=0..2, and transversal coefficients d_(1,w), w=0..1."""
        b = _kronecker_row(j)
        H = _kronecker_hessian(j)
        trace = np.array([
            float(j == (0, 0)),
            b @ self.t0,
            self.t0 @ H @ self.t0 + b @ self.t1,
        ])
        transversal = np.array([
            b @ self.d0,
            self.t0 @ H @ self.d0 + b @ self.d1,
        ])
        return trace, transversal


@dataclass
class VertexFan:
    """Fan data a vertex function needs: transforms, jets, gluing and the scaling sigma."""
    vertex: int
    patches: List[int]
    transforms: List[ParamTransform]
    jacobians: List[np.ndarray]
    mixed: List[np.ndarray]
    prev_gluing: List[EdgeGluingData]
    next_gluing: List[EdgeGluingData]
    prev_jets: List[FanEdgeJet]
    next_jets: List[FanEdgeJet]
    sigma: float


def _interface_jet(jacobian: np.ndarray, hessian: np.ndarray, data: EdgeGluingData) -> FanEdgeJet:
    """Jet of the edge on the WEST side of a fan patch (the patch plays the i1 role)."""
    t0 = jacobian[:, 1]
    t1 = hessian[:, 1, 1]
    X = jacobian[:, 0]
    dX = hessian[:, 0, 1]
    a, da = data.alpha1(0.0), data.alpha1.deriv()(0.0)
    b, db = data.beta1(0.0), data.beta1.deriv()(0.0)
    numerator = X + b * t0
    d0 = numerator / a
    d1 = (dX + db * t0 + b * t1) / a - da * numerator / (a * a)
    return FanEdgeJet(t0, t1, d0, d1)


def _first_boundary_jet(jacobian: np.ndarray, hessian: np.ndarray) -> FanEdgeJet:
    """Boundary edge on the SOUTH side of the first fan patch."""
    return FanEdgeJet(jacobian[:, 0], hessian[:, 0, 0], -jacobian[:, 1], -hessian[:, 0, 1])


def _last_boundary_jet(jacobian: np.ndarray, hessian: np.ndarray) -> FanEdgeJet:
    """Boundary edge on the WEST side of the last fan patch."""
    return FanEdgeJet(jacobian[:, 1], hessian[:, 1, 1], jacobian[:, 0], hessian[:, 0, 1])


class C1Construction:
    """
    Builds the basis functions of the C1 space over an AS-G1 surface.

    Args:
        surface: AS-G1 multi-patch surface
        topology: Its topology
        gluing: Gluing data indexed like topology.edges
        space: Univariate analysis space S^{p,r} with k elements
    """

    def __init__(self, surface: MultiPatchSurface, topology: Topology, gluing: List[EdgeGluingData], space: UnivariateSplineSpace):
        self.surface = surface
        self.topology = topology
        self.gluing = gluing
        self.space = space
        self.tables = UnivariateTables(space)
        self.shape = (space.dimension, space.dimension)

    # -- patch functions ---------------------------------------------------

    def patch_function(self, patch: int, j1: int, j2: int) -> C1BasisFunction:
        n = self.space.dimension
        if not (2 <= j1 <= n - 3 and 2 <= j2 <= n - 3):
            raise ParameterError(f"patch function index ({j1}, {j2}) outside 2..{n - 3}")
        if not 0 <= patch < len(self.surface):
            raise ParameterError(f"no patch {patch}")
        table = np.zeros(self.shape)
        table[j1, j2] = 1.0
        return C1BasisFunction(BasisKind.PATCH, patch, (j1, j2), {patch: table})

    # -- edge functions ----------------------------------------------------

    def _edge_tables(self, data: EdgeGluingData, j1: int, j2: int) -> Tuple[np.ndarray, np.ndarray]:
        """Tables on the WEST patch and on the SOUTH patch of the standard form."""
        tab = self.tables
        g = tab.greville
        m0, m1 = tab.m_base
        if j2 == 0:
            values, derivs = tab.higher[0][:, j1], tab.higher[1][:, j1]
            trace = tab.interpolate(values)
            first = np.outer(m0, trace) - np.outer(m1, tab.interpolate(data.beta1(g) * derivs))
            second = np.outer(trace, m0) - np.outer(tab.interpolate(data.beta2(g) * derivs), m1)
        else:
            values = tab.lower[:, j1]
            first = np.outer(m1, tab.interpolate(data.alpha1(g) * values))
            second = -np.outer(tab.interpolate(data.alpha2(g) * values), m1)
        return first, second

    def edge_function(self, edge: int, j1: int, j2: int) -> C1BasisFunction:
        """
        Edge function (j1, j2) of an interface or boundary edge.

        Raises:
            ParameterError: Index outside the edge range
        """
        if (j1, j2) not in edge_indices(self.space):
            raise ParameterError(f"edge function index ({j1}, {j2}) out of range")
        record = self.topology.edges[edge]
        form = standard_form_edge(self.topology, record)
        first, second = self._edge_tables(self.gluing[edge], j1, j2)
        tables = {form.patch1: _prune(form.transform1.inverse().apply(first))}
        if record.is_interface:
            tables[form.patch2] = _prune(form.transform2.inverse().apply(second))
        return C1BasisFunction(BasisKind.EDGE, edge, (j1, j2), tables)

    # -- vertex functions --------------------------------------------------

    def vertex_fan(self, vertex: int) -> VertexFan:
        """Standard form, jets and fan-local gluing of a vertex."""
        record = self.topology.vertices[vertex]
        form = standard_form_vertex(self.surface, self.topology, record)
        fan = form.fan_patches(self.surface)
        nu = len(fan)

        jacobians, hessians = [], []
        for patch in fan:
            evaluation = eval_patch(patch, (0.0, 0.0), 2)
            jacobians.append(evaluation.jacobian[:2])
            hessians.append(evaluation.hessian[:2])

        # gluing between fan patch l (WEST) and l + 1 (SOUTH)
        boundary = EdgeGluingData.boundary()
        next_gluing: List[EdgeGluingData] = []
        next_jets: List[FanEdgeJet] = []
        for ell in range(nu):
            if ell == nu - 1 and not form.closed:
                next_gluing.append(boundary)
                next_jets.append(_last_boundary_jet(jacobians[ell], hessians[ell]))
                continue
            try:
                data = glue_standard_pair(fan[ell], fan[(ell + 1) % nu])
            except ValueError as e:
                raise TopologyError(f"vertex {vertex}: fan interface {ell} is not AS-G1 ({e})") from e
            next_gluing.append(data)
            next_jets.append(_interface_jet(jacobians[ell], hessians[ell], data))

        if form.closed:
            prev_gluing = [next_gluing[(ell - 1) % nu] for ell in range(nu)]
            prev_jets = [next_jets[(ell - 1) % nu] for ell in range(nu)]
        else:
            prev_gluing = [boundary] + next_gluing[:-1]
            prev_jets = [_first_boundary_jet(jacobians[0], hessians[0])] + next_jets[:-1]

        spread = sum(np.linalg.norm(J, 2) for J in jacobians)
        sigma = 1.0 / (self.space.h / (self.space.p * nu) * spread)
        return VertexFan(
            vertex=vertex,
            patches=form.patches,
            transforms=form.transforms,
            jacobians=jacobians,
            mixed=[H[:, 0, 1] for H in hessians],
            prev_gluing=prev_gluing,
            next_gluing=next_gluing,
            prev_jets=prev_jets,
            next_jets=next_jets,
            sigma=sigma,
        )

    def _vertex_table(self, fan: VertexFan, ell: int, j: Tuple[int, int]) -> np.ndarray:
        tab = self.tables
        g = tab.greville
        m0, m1 = tab.m_base

        def trace_and_transversal(jet: FanEdgeJet, alpha, beta, sign: float):
            trace_c, trans_c = jet.coefficients(j)
            trace = sum(c * tab.m_higher[w][0] for w, c in enumerate(trace_c))
            slope = sum(c * tab.m_higher[w][1] for w, c in enumerate(trace_c))
            transversal = sum(c * tab.m_lower[w] for w, c in enumerate(trans_c))
            return (
                tab.interpolate(trace),
                tab.interpolate(-beta(g) * slope + sign * alpha(g) * transversal),
            )

        nxt = fan.next_gluing[ell]
        trace, cross = trace_and_transversal(fan.next_jets[ell], nxt.alpha1, nxt.beta1, 1.0)
        table = np.outer(m0, trace) + np.outer(m1, cross)

        prv = fan.prev_gluing[ell]
        trace, cross = trace_and_transversal(fan.prev_jets[ell], prv.alpha2, prv.beta2, -1.0)
        table += np.outer(trace, m0) + np.outer(cross, m1)

        # patch-local correction g^(l)
        b = _kronecker_row(j)
        H = _kronecker_hessian(j)
        J = fan.jacobians[ell]
        local = np.array([
            [float(j == (0, 0)), b @ J[:, 1]],
            [b @ J[:, 0], J[:, 0] @ H @ J[:, 1] + b @ fan.mixed[ell]],
        ])
        for w1 in (0, 1):
            for w2 in (0, 1):
                table -= local[w1, w2] * np.outer(tab.m_base[w1], tab.m_base[w2])
        return table * fan.sigma ** (j[0] + j[1])

    def vertex_function(self, vertex: int, j1: int, j2: int, fan: Optional[VertexFan] = None) -> C1BasisFunction:
        """
        Vertex function (j1, j2), j1 + j2 <= 2.

        Raises:
            ParameterError: Index outside the vertex range
        """
        if (j1, j2) not in VERTEX_INDICES:
            raise ParameterError(f"vertex function index ({j1}, {j2}) requires j1, j2 >= 0 and j1 + j2 <= 2")
        fan = fan or self.vertex_fan(vertex)
        tables: Dict[int, np.ndarray] = {}
        for ell, (patch, transform) in enumerate(zip(fan.patches, fan.transforms)):
            table = transform.inverse().apply(self._vertex_table(fan, ell, (j1, j2)))
            tables[patch] = tables.get(patch, 0.0) + table
        return C1BasisFunction(
            BasisKind.VERTEX, vertex, (j1, j2),
            {patch: _prune(table) for patch, table in tables.items()},
        )

    def vertex_functions(self, vertex: int) -> List[C1BasisFunction]:
        fan = self.vertex_fan(vertex)
        return [self.vertex_function(vertex, j1, j2, fan) for j1, j2 in VERTEX_INDICES]

    # -- per-entity batches --------------------------------------------------

    def patch_functions(self, patch: int) -> List[C1BasisFunction]:
        return [self.patch_function(patch, j1, j2) for j1, j2 in patch_indices(self.space)]

    def edge_functions(self, edge: int) -> List[C1BasisFunction]:
        return [self.edge_function(edge, j1, j2) for j1, j2 in edge_indices(self.space)]
