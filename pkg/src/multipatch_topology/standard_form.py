"""
Standard Forms

Local reparameterisations used by the C1 construction. An interface in
standard form reads P1(0, t) = P2(t, 0); a vertex in standard form sits at
(0, 0) of every fan patch, with the surface rotated so that its normal there
is the x3-axis.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from errors import TopologyError
from spline_core import TensorSplinePatch, eval_patch
from .models import Edge, MultiPatchSurface, ParamTransform, Side, Topology, Vertex

logger = logging.getLogger(__name__)


def _on_side(xi: Tuple[float, float], side: Side, tol: float = 1e-12) -> bool:
    return abs(xi[side.axis] - side.end) <= tol


def _side_parameter(xi: Tuple[float, float], side: Side) -> float:
    return xi[1 - side.axis]


def transform_for_side(side: Side, target: Side, preserve_orientation: bool = True) -> List[ParamTransform]:
    """Square symmetries moving ``side`` to ``target`` (new parameters)."""
    found = []
    for transform in ParamTransform.all():
        if preserve_orientation and transform.orientation < 0:
            continue
        mapped = [transform.map_params(target.point(t)) for t in (0.25, 0.75)]
        if all(_on_side(xi, side) for xi in mapped):
            found.append(transform)
    return found


def transform_for_corner(corner: Tuple[int, int], prev_side: Side, next_side: Side) -> ParamTransform:
    """
    Symmetry sending the corner to (0, 0), ``prev_side`` to SOUTH and
    ``next_side`` to WEST.
    """
    for transform in ParamTransform.all():
        origin = transform.map_params((0.0, 0.0))
        if (round(origin[0]), round(origin[1])) != tuple(corner):
            continue
        if _on_side(transform.map_params((0.5, 0.0)), prev_side) and _on_side(transform.map_params((0.0, 0.5)), next_side):
            return transform
    raise TopologyError(f"sides {prev_side.value}/{next_side.value} do not meet at corner {corner}")


@dataclass
class EdgeStandardForm:
    """Transforms of an edge; patch2/transform2 are None on boundary edges."""

    edge: Edge
    patch1: int
    transform1: ParamTransform
    patch2: Optional[int] = None
    transform2: Optional[ParamTransform] = None

    def patches(self, surface: MultiPatchSurface) -> Tuple[TensorSplinePatch, Optional[TensorSplinePatch]]:
        first = self.transform1.apply_patch(surface[self.patch1])
        second = None
        if self.patch2 is not None:
            second = self.transform2.apply_patch(surface[self.patch2])
        return first, second


def standard_form_edge(topology: Topology, edge: Edge) -> EdgeStandardForm:
    """
    Transforms putting an edge into standard form.

    Args:
        topology: Topology of the surface
        edge: Interface or boundary edge

    Returns:
        EdgeStandardForm: P1(0, t) = P2(t, 0) after applying the transforms

    Raises:
        TopologyError: Patches along the interface are inconsistently oriented
    """
    first = transform_for_side(edge.side1, Side.WEST)
    transform1 = next(t for t in first if t.is_identity) if any(t.is_identity for t in first) else first[0]
    if edge.is_boundary:
        return EdgeStandardForm(edge, edge.patch1, transform1)

    start1 = _side_parameter(transform1.map_params((0.0, 0.0)), edge.side1)
    start2 = 1.0 - start1 if edge.reversed else start1
    for transform2 in transform_for_side(edge.side2, Side.SOUTH, preserve_orientation=False):
        mapped = transform2.map_params((0.0, 0.0))
        if abs(_side_parameter(mapped, edge.side2) - start2) < 0.5:
            break
    else:
        raise TopologyError(f"no standard form for edge {edge.index}")
    if transform2.orientation != transform1.orientation:
        raise TopologyError(
            f"patches {edge.patch1} and {edge.patch2} are inconsistently oriented"
        )
    return EdgeStandardForm(edge, edge.patch1, transform1, edge.patch2, transform2)


def minimal_rotation(normal: np.ndarray) -> np.ndarray:
    """Rotation taking the unit vector ``normal`` to (0, 0, 1)."""
    n = normal / np.linalg.norm(normal)
    e3 = np.array([0.0, 0.0, 1.0])
    v = np.cross(n, e3)
    s = np.linalg.norm(v)
    c = float(n @ e3)
    if s < 1e-14:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])
    vx = np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])
    return np.eye(3) + vx + vx @ vx * ((1.0 - c) / (s * s))


@dataclass
class VertexStandardForm:
    """Fan patches P_1..P_nu with their transforms and the shared rotation."""

    vertex: Vertex
    patches: List[int]
    transforms: List[ParamTransform]
    rotation: np.ndarray

    @property
    def valence(self) -> int:
        return len(self.patches)

    @property
    def closed(self) -> bool:
        return not self.vertex.boundary

    def fan_patches(self, surface: MultiPatchSurface) -> List[TensorSplinePatch]:
        """Transformed and rotated fan patches."""
        rotated = []
        for i, transform in zip(self.patches, self.transforms):
            control = transform.apply(surface[i].control) @ self.rotation.T
            rotated.append(TensorSplinePatch(surface[i].space, control))
        return rotated


def standard_form_vertex(surface: MultiPatchSurface, topology: Topology, vertex: Vertex) -> VertexStandardForm:
    """
    Standard form of a vertex fan.

    Args:
        surface: Multi-patch surface
        topology: Its topology
        vertex: Vertex of the topology

    Returns:
        VertexStandardForm: Ordered fan, transforms and rotation R

    Raises:
        TopologyError: Fan patches do not share the vertex point
    """
    tol = 1e-9 * max(surface.bounding_box_diagonal, 1e-300)
    normals = []
    for entry, transform in zip(vertex.fan, vertex.transforms):
        patch = transform.apply_patch(surface[entry.patch])
        evaluation = eval_patch(patch, (0.0, 0.0), 1)
        if np.linalg.norm(evaluation.point - vertex.point) > tol:
            raise TopologyError(
                f"patch {entry.patch} does not contain vertex {vertex.index}"
            )
        normal = np.cross(evaluation.jacobian[:, 0], evaluation.jacobian[:, 1])
        normals.append(normal / np.linalg.norm(normal))

    rotation = minimal_rotation(np.mean(normals, axis=0))
    deviation = max(np.linalg.norm(rotation @ n - np.array([0.0, 0.0, 1.0])) for n in normals)
    if deviation > 1e-8:
        logger.warning(f"Vertex {vertex.index}: fan normals differ by {deviation:.2e}")
    return VertexStandardForm(
        vertex=vertex,
        patches=[entry.patch for entry in vertex.fan],
        transforms=list(vertex.transforms),
        rotation=rotation,
    )
