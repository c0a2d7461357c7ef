"""
Topology Discovery

Matches patch sides into interfaces, classifies boundary edges and orders the
patch fans around every vertex by walking the interface graph.
"""

import logging
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize_scalar
from scipy.spatial import cKDTree

from errors import TopologyError, UnsupportedTopologyError
from spline_core import TensorSplinePatch, eval_patch
from .models import (
    Edge,
    FanEntry,
    MultiPatchSurface,
    Side,
    Topology,
    Vertex,
    corner_sides,
)
from .standard_form import standard_form_edge, transform_for_corner

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
CORNERS = [(0, 0), (1, 0), (0, 1), (1, 1)]


def _polygons_match(a: np.ndarray, b: np.ndarray, tol: float) -> Optional[bool]:
    """None if no match, else the reversal flag."""
    if a.shape != b.shape:
        return None
    if np.max(np.linalg.norm(a - b, axis=1)) <= tol:
        return False
    if np.max(np.linalg.norm(a - b[::-1], axis=1)) <= tol:
        return True
    return None


class _UnionFind:
    """Disjoint sets over hashable items; the earliest item is the root."""

    def __init__(self, items):
        self.rank = {item: i for i, item in enumerate(items)}
        self.parent = {item: item for item in items}

    def find(self, item):
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] > self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra


def match_sides_bruteforce(surface: MultiPatchSurface, tol: float = DEFAULT_TOL) -> List[Tuple[int, Side, int, Side, bool]]:
    """All-pairs side matching; reference oracle for build_topology."""
    abs_tol = tol * surface.bounding_box_diagonal
    sides = [(i, side) for i in range(len(surface)) for side in Side]
    matches = []
    for (i, s), (j, t) in combinations(sides, 2):
        if i == j:
            continue
        flag = _polygons_match(s.polygon(surface[i].control), t.polygon(surface[j].control), abs_tol)
        if flag is not None:
            matches.append((i, s, j, t, flag))
    return matches


def build_topology(surface: MultiPatchSurface, tol: float = DEFAULT_TOL) -> Topology:
    """
    Discover interfaces, boundary edges and vertex fans.

    Args:
        surface: Conforming multi-patch surface
        tol: Matching tolerance relative to the bounding-box diagonal

    Returns:
        Topology: Edges (interfaces first) and counterclockwise vertex fans

    Raises:
        TopologyError: Non-conforming interface or inconsistent orientation
        UnsupportedTopologyError: T-junctions or patches touching only at a corner
    """
    abs_tol = tol * max(surface.bounding_box_diagonal, 1e-300)
    keys = [(i, side) for i in range(len(surface)) for side in Side]
    polygons = [side.polygon(surface[i].control) for i, side in keys]
    centroids = np.array([polygon.mean(axis=0) for polygon in polygons])

    partner: Dict[int, Tuple[int, bool]] = {}
    tree = cKDTree(centroids)
    for a, b in sorted(tree.query_pairs(abs_tol)):
        if keys[a][0] == keys[b][0]:
            continue
        flag = _polygons_match(polygons[a], polygons[b], abs_tol)
        if flag is None:
            raise TopologyError(
                f"non-conforming interface between patches {keys[a][0]} and {keys[b][0]}"
            )
        if a in partner or b in partner:
            raise TopologyError(f"side {keys[a][1].value} of patch {keys[a][0]} matches more than one side")
        partner[a] = (b, flag)
        partner[b] = (a, flag)

    edges: List[Edge] = []
    for a, (b, flag) in sorted(partner.items()):
        if a < b:
            (i1, s1), (i2, s2) = keys[a], keys[b]
            edges.append(Edge(len(edges), i1, s1, i2, s2, flag))
    for a, (i, side) in enumerate(keys):
        if a not in partner:
            edges.append(Edge(len(edges), i, side))

    topology = Topology(n_patches=len(surface), edges=edges)
    _check_unmatched_sides(surface, topology, abs_tol)
    _check_t_junctions(surface, topology, abs_tol)
    for edge in topology.interfaces:
        standard_form_edge(topology, edge)
    topology.vertices = _build_vertices(surface, topology, abs_tol)

    logger.debug(f"Topology: {topology.summary()}")
    return topology


def _check_unmatched_sides(surface: MultiPatchSurface, topology: Topology, tol: float):
    """Boundary sides sharing both end points must be a matched interface."""
    ends = []
    for edge in topology.boundary_edges:
        polygon = edge.side1.polygon(surface[edge.patch1].control)
        ends.append((edge, polygon[0], polygon[-1]))
    for a, (first, p0, p1) in enumerate(ends):
        for second, q0, q1 in ends[a + 1:]:
            if first.patch1 == second.patch1:
                continue
            same = np.linalg.norm(p0 - q0) <= tol and np.linalg.norm(p1 - q1) <= tol
            swapped = np.linalg.norm(p0 - q1) <= tol and np.linalg.norm(p1 - q0) <= tol
            if same or swapped:
                raise TopologyError(
                    f"non-conforming interface between patches {first.patch1} and {second.patch1}: "
                    f"sides {first.side1.value} and {second.side1.value} share end points but not control points"
                )


def _check_t_junctions(surface: MultiPatchSurface, topology: Topology, tol: float):
    corner_points = [
        (i, corner, surface[i].corner(*corner))
        for i in range(len(surface))
        for corner in CORNERS
    ]
    for edge in topology.boundary_edges:
        patch = surface[edge.patch1]
        polygon = edge.side1.polygon(patch.control)
        lo = polygon.min(axis=0) - tol
        hi = polygon.max(axis=0) + tol
        ends = (polygon[0], polygon[-1])
        for i, _, point in corner_points:
            if i == edge.patch1 or np.any(point < lo) or np.any(point > hi):
                continue
            if min(np.linalg.norm(point - end) for end in ends) <= tol:
                continue
            result = minimize_scalar(
                lambda t: np.linalg.norm(eval_patch(patch, edge.side1.point(t)).point - point),
                bounds=(0.0, 1.0),
                method="bounded",
                options={"xatol": 1e-12},
            )
            if result.fun <= tol:
                raise UnsupportedTopologyError(
                    f"T-junction: corner of patch {i} lies inside side {edge.side1.value} of patch {edge.patch1}"
                )


def _build_vertices(surface: MultiPatchSurface, topology: Topology, tol: float) -> List[Vertex]:
    entries = [FanEntry(i, corner) for i in range(topology.n_patches) for corner in CORNERS]
    groups = _UnionFind(entries)
    for edge in topology.interfaces:
        first = edge.side1.corners()
        second = edge.side2.corners()
        if edge.reversed:
            second = second[::-1]
        for c1, c2 in zip(first, second):
            groups.union(FanEntry(edge.patch1, c1), FanEntry(edge.patch2, c2))

    members: Dict[FanEntry, List[FanEntry]] = {}
    for entry in entries:
        members.setdefault(groups.find(entry), []).append(entry)

    vertices: List[Vertex] = []
    points = []
    for root in sorted(members, key=lambda e: (e.patch, e.corner[1], e.corner[0])):
        group = members[root]
        point = surface[group[0].patch].corner(*group[0].corner)
        for entry in group:
            if np.linalg.norm(surface[entry.patch].corner(*entry.corner) - point) > tol:
                raise TopologyError(f"fan around patch {entry.patch} corner {entry.corner} is inconsistent")
        fan, transforms, fan_edges, closed = _walk_fan(topology, group)
        vertices.append(Vertex(len(vertices), point, fan, fan_edges, transforms, boundary=not closed))
        points.append(point)

    if len(points) > 1:
        pairs = cKDTree(np.array(points)).query_pairs(tol)
        if pairs:
            a, b = sorted(pairs)[0]
            raise UnsupportedTopologyError(f"vertices {a} and {b} coincide without a shared interface")
    return vertices


def _walk_fan(topology: Topology, group: List[FanEntry]):
    """Order a vertex group; prev side maps to SOUTH, next side to WEST."""
    members = set(group)

    def edge_of(entry: FanEntry, side: Side) -> Edge:
        return topology.edge_at(entry.patch, side)

    def across(entry: FanEntry, side: Side) -> Tuple[FanEntry, Side]:
        edge = edge_of(entry, side)
        other_patch = edge.patch2 if edge.patch1 == entry.patch else edge.patch1
        other_side = edge.side_of(other_patch)
        for candidate in group:
            if candidate.patch == other_patch and candidate.corner in other_side.corners() and candidate != entry:
                return candidate, other_side
        raise TopologyError(f"fan walk left the vertex at patch {entry.patch}")

    def other_side(entry: FanEntry, side: Side) -> Side:
        a, b = corner_sides(entry.corner)
        return b if side == a else a

    candidates = []
    for entry in sorted(group, key=lambda e: (e.patch, e.corner[1], e.corner[0])):
        for prev in corner_sides(entry.corner):
            nxt = other_side(entry, prev)
            transform = transform_for_corner(entry.corner, prev, nxt)
            if transform.orientation < 0:
                continue
            candidates.append((edge_of(entry, prev).is_boundary, entry, prev, nxt))
    boundary_starts = [c for c in candidates if c[0]]
    start = boundary_starts[0] if boundary_starts else candidates[0]
    _, entry, prev, nxt = start

    fan: List[FanEntry] = []
    transforms = []
    fan_edges = [edge_of(entry, prev).index]
    closed = False
    while True:
        fan.append(entry)
        transforms.append(transform_for_corner(entry.corner, prev, nxt))
        edge = edge_of(entry, nxt)
        fan_edges.append(edge.index)
        if edge.is_boundary:
            break
        entry, prev = across(entry, nxt)
        nxt = other_side(entry, prev)
        if entry == fan[0]:
            closed = True
            break
        if len(fan) > len(members):
            raise TopologyError("vertex fan does not close")
    if len(fan) != len(members):
        raise TopologyError(f"vertex fan visits {len(fan)} of {len(members)} patch corners")
    if any(t.orientation < 0 for t in transforms):
        raise TopologyError(f"patches around patch {fan[0].patch} corner {fan[0].corner} are inconsistently oriented")
    return fan, transforms, fan_edges, closed


def select_boundary_edges(
    surface: MultiPatchSurface,
    topology: Topology,
    predicate: Callable[[np.ndarray], bool],
    samples: int = 5,
) -> List[Tuple[int, Side]]:
    """Boundary edges whose sampled points all satisfy ``predicate``."""
    selected = []
    for edge in topology.boundary_edges:
        patch = surface[edge.patch1]
        points = [eval_patch(patch, edge.side1.point(t)).point for t in np.linspace(0, 1, samples)]
        if all(predicate(point) for point in points):
            selected.append((edge.patch1, edge.side1))
    return selected


def _polish(residual, jacobian, xi: np.ndarray, iterations: int = 20) -> np.ndarray:
    """Projected Gauss-Newton steps; the bounded solver stalls short of the patch boundary."""
    # snap parameters that are within round-off of a side
    xi = np.where(np.abs(xi) < 1e-7, 0.0, np.where(np.abs(xi - 1.0) < 1e-7, 1.0, xi))
    for _ in range(iterations):
        r = residual(xi)
        step, *_ = np.linalg.lstsq(jacobian(xi), r, rcond=None)
        moved = np.clip(xi - step, 0.0, 1.0)
        if np.linalg.norm(residual(moved)) >= np.linalg.norm(r):
            break
        xi = moved
    return xi


def locate_point(patches: Sequence[TensorSplinePatch], x: np.ndarray, tol: float = 1e-9) -> Tuple[int, Tuple[float, float]]:
    """
    Find a patch and parameters with P(xi) = x (first two or all coordinates).

    Raises:
        TopologyError: No patch contains the point
    """
    x = np.asarray(x, dtype=float)
    dims = x.size
    for i, patch in enumerate(patches):
        def residual(xi):
            return eval_patch(patch, np.clip(xi, 0.0, 1.0)).point[:dims] - x

        def jacobian(xi):
            return eval_patch(patch, np.clip(xi, 0.0, 1.0), 1).jacobian[:dims]

        best = None
        for guess in ((0.5, 0.5), (0.1, 0.1), (0.9, 0.1), (0.1, 0.9), (0.9, 0.9)):
            result = least_squares(residual, guess, jac=jacobian, bounds=([0.0, 0.0], [1.0, 1.0]),
                                   xtol=1e-15, ftol=1e-15, gtol=1e-15)
            if best is None or result.cost < best.cost:
                best = result
        xi = _polish(residual, jacobian, best.x)
        if np.linalg.norm(residual(xi)) <= tol * max(1.0, np.linalg.norm(x)):
            return i, (float(xi[0]), float(xi[1]))
    raise TopologyError(f"point {x} lies on no patch")
