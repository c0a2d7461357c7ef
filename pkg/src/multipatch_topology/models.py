"""
Multi-Patch Data Models

Patch sides, square symmetries, edges, vertex fans and the surface container.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import ParameterError
from spline_core import TensorSplinePatch, TensorSplineSpace, eval_patch


class Side(str, Enum):
    """Patch sides in the unit parameter square."""
    WEST = "west"    # xi1 = 0
    EAST = "east"    # xi1 = 1
    SOUTH = "south"  # xi2 = 0
    NORTH = "north"  # xi2 = 1

    @property
    def axis(self) -> int:
        """Parametric direction that is constant along the side."""
        return 0 if self in (Side.WEST, Side.EAST) else 1

    @property
    def end(self) -> int:
        return 1 if self in (Side.EAST, Side.NORTH) else 0

    def point(self, t: float) -> Tuple[float, float]:
        """Parameter pair of the side point with running parameter t."""
        if self.axis == 0:
            return float(self.end), t
        return t, float(self.end)

    def corners(self) -> Tuple[Tuple[int, int], Tuple[int, int]]:
        start = self.point(0.0)
        stop = self.point(1.0)
        return (int(start[0]), int(start[1])), (int(stop[0]), int(stop[1]))

    def polygon(self, control: np.ndarray) -> np.ndarray:
        """Control points along the side, ordered by increasing t."""
        if self == Side.WEST:
            return control[0, :]
        if self == Side.EAST:
            return control[-1, :]
        if self == Side.SOUTH:
            return control[:, 0]
        return control[:, -1]

    @staticmethod
    def containing(xi: Sequence[float], tol: float = 1e-12) -> List["Side"]:
        sides = []
        if abs(xi[0]) <= tol:
            sides.append(Side.WEST)
        if abs(xi[0] - 1.0) <= tol:
            sides.append(Side.EAST)
        if abs(xi[1]) <= tol:
            sides.append(Side.SOUTH)
        if abs(xi[1] - 1.0) <= tol:
            sides.append(Side.NORTH)
        return sides


def corner_sides(corner: Tuple[int, int]) -> Tuple[Side, Side]:
    """The side running along xi1 and the side running along xi2 at a corner."""
    along_first = Side.NORTH if corner[1] else Side.SOUTH
    along_second = Side.EAST if corner[0] else Side.WEST
    return along_first, along_second


@dataclass(frozen=True)
class ParamTransform:
    """
    One of the eight symmetries of the unit square.

    Acting on a coefficient table the operations are applied in the order
    swap, flip of the first index, flip of the second index. The transformed
    patch satisfies P_new(eta) = P_old(map_params(eta)).
    """

    swap: bool = False
    flip1: bool = False
    flip2: bool = False

    @staticmethod
    def all() -> List["ParamTransform"]:
        return [
            ParamTransform(s, f1, f2)
            for s in (False, True)
            for f1 in (False, True)
            for f2 in (False, True)
        ]

    @property
    def is_identity(self) -> bool:
        return not (self.swap or self.flip1 or self.flip2)

    @property
    def orientation(self) -> int:
        return -1 if (self.swap + self.flip1 + self.flip2) % 2 else 1

    def apply(self, table: np.ndarray) -> np.ndarray:
        out = table
        if self.swap:
            out = np.swapaxes(out, 0, 1)
        if self.flip1:
            out = out[::-1]
        if self.flip2:
            out = out[:, ::-1]
        return np.ascontiguousarray(out)

    def inverse(self) -> "ParamTransform":
        if self.swap:
            return ParamTransform(True, self.flip2, self.flip1)
        return self

    def map_params(self, eta: Sequence[float]) -> Tuple[float, float]:
        x1, x2 = float(eta[0]), float(eta[1])
        if self.flip2:
            x2 = 1.0 - x2
        if self.flip1:
            x1 = 1.0 - x1
        if self.swap:
            x1, x2 = x2, x1
        return x1, x2

    def apply_patch(self, patch: TensorSplinePatch) -> TensorSplinePatch:
        return TensorSplinePatch(patch.space, self.apply(patch.control))


IDENTITY = ParamTransform()


@dataclass(frozen=True)
class Edge:
    """Interface (two patch sides) or boundary edge (one side)."""

    index: int
    patch1: int
    side1: Side
    patch2: Optional[int] = None
    side2: Optional[Side] = None
    reversed: bool = False

    @property
    def is_interface(self) -> bool:
        return self.patch2 is not None

    @property
    def is_boundary(self) -> bool:
        return self.patch2 is None

    @property
    def patches(self) -> Tuple[int, ...]:
        return (self.patch1,) if self.patch2 is None else (self.patch1, self.patch2)

    def side_of(self, patch: int) -> Side:
        if patch == self.patch1:
            return self.side1
        if patch == self.patch2:
            return self.side2
        raise ParameterError(f"patch {patch} is not on edge {self.index}")


@dataclass(frozen=True)
class FanEntry:
    """One patch corner of a vertex fan."""
    patch: int
    corner: Tuple[int, int]


@dataclass
class Vertex:
    """Vertex with its fan ordered counterclockwise."""

    index: int
    point: np.ndarray
    fan: List[FanEntry]
    edges: List[int]          # e_0 .. e_nu (closed fans repeat e_0 at the end)
    transforms: List[ParamTransform]
    boundary: bool

    @property
    def valence(self) -> int:
        return len(self.fan)


@dataclass
class MultiPatchSurface:
    """Conforming collection of surface patches sharing one geometry space."""

    patches: List[TensorSplinePatch]

    def __post_init__(self):
        if not self.patches:
            raise ParameterError("a surface needs at least one patch")
        space = self.patches[0].space
        for i, patch in enumerate(self.patches):
            if patch.space != space:
                raise ParameterError(f"patch {i} uses {patch.space.univariate}, expected {space.univariate}")
            if patch.dim != 3:
                raise ParameterError(f"patch {i} has dimension {patch.dim}, expected 3")

    @property
    def space(self) -> TensorSplineSpace:
        return self.patches[0].space

    def __len__(self) -> int:
        return len(self.patches)

    def __getitem__(self, i: int) -> TensorSplinePatch:
        return self.patches[i]

    def copy(self) -> "MultiPatchSurface":
        return MultiPatchSurface([patch.copy() for patch in self.patches])

    @property
    def bounding_box_diagonal(self) -> float:
        points = np.concatenate([patch.control.reshape(-1, 3) for patch in self.patches])
        return float(np.linalg.norm(points.max(axis=0) - points.min(axis=0)))

    def is_regular(self, samples: int = 5) -> bool:
        """Jacobian rank 2 at a grid of sample points on every patch."""
        ts = np.linspace(0.0, 1.0, samples)
        for patch in self.patches:
            for a in ts:
                for b in ts:
                    jac = eval_patch(patch, (a, b), 1).jacobian
                    if np.linalg.norm(np.cross(jac[:, 0], jac[:, 1])) <= 1e-14 * max(np.linalg.norm(jac) ** 2, 1e-300):
                        return False
        return True


@dataclass
class Topology:
    """Edges (interfaces first, then boundary edges) and vertices of a surface."""

    n_patches: int
    edges: List[Edge] = field(default_factory=list)
    vertices: List[Vertex] = field(default_factory=list)

    @property
    def interfaces(self) -> List[Edge]:
        return [edge for edge in self.edges if edge.is_interface]

    @property
    def boundary_edges(self) -> List[Edge]:
        return [edge for edge in self.edges if edge.is_boundary]

    @property
    def inner_vertices(self) -> List[Vertex]:
        return [v for v in self.vertices if not v.boundary]

    @property
    def boundary_vertices(self) -> List[Vertex]:
        return [v for v in self.vertices if v.boundary]

    def edge_at(self, patch: int, side: Side) -> Edge:
        for edge in self.edges:
            if (edge.patch1 == patch and edge.side1 == side) or (edge.patch2 == patch and edge.side2 == side):
                return edge
        raise ParameterError(f"no edge on patch {patch} side {side.value}")

    def summary(self) -> dict:
        return {
            "patches": self.n_patches,
            "interfaces": len(self.interfaces),
            "boundary_edges": len(self.boundary_edges),
            "vertices": len(self.vertices),
            "valences": [v.valence for v in self.vertices],
        }
