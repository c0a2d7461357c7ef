"""
Planar Layouts

Bilinear and biquadratic planar multi-patch parameterisations of the
benchmark domains, plus small fixtures. Quads are listed counterclockwise
(a, b, c, d) with xi1 running a -> b and xi2 running a -> d.
"""

from typing import List, Sequence, Tuple

import numpy as np

from multipatch_topology import MultiPatchSurface
from spline_core import TensorSplinePatch, TensorSplineSpace, UnivariateSplineSpace, collocation_matrix, greville_abscissae
from .compose import embed_planar

Point = Tuple[float, float]
Quad = Tuple[Point, Point, Point, Point]

BILINEAR = TensorSplineSpace.uniform(1, 0, 1)


def bilinear_patch(quad: Quad) -> TensorSplinePatch:
    a, b, c, d = (np.asarray(x, dtype=float) for x in quad)
    return TensorSplinePatch(BILINEAR, np.array([[a, d], [b, c]]))


def rectangle(x0: float, x1: float, y0: float, y1: float) -> Quad:
    return (x0, y0), (x1, y0), (x1, y1), (x0, y1)


def planar_surface(quads: Sequence[Quad]) -> MultiPatchSurface:
    """Bilinear quads embedded in z = 0."""
    return MultiPatchSurface([embed_planar(bilinear_patch(q)) for q in quads])


# ----------------------------------------------------------------------
# hyperboloid parameter domains on [-L/2, L/2]^2

def _scaled(quads: Sequence[Quad], length: float) -> List[Quad]:
    return [tuple((length * x, length * y) for x, y in quad) for quad in quads]


def hyperboloid_layout_1(length: float = 1.0) -> List[Quad]:
    """Two half squares, each split into three quads around a valence-3 vertex."""
    A, M, B, O, C, D = (-0.5, -0.5), (-0.25, -0.5), (0.0, -0.5), (0.0, 0.0), (0.0, 0.5), (-0.5, 0.5)
    V = (-0.2, -0.15)
    left = [(A, M, V, D), (M, B, O, V), (V, O, C, D)]
    right = [tuple((-x, y) for x, y in reversed(quad)) for quad in left]
    return _scaled(left + right, length)


def hyperboloid_layout_2(length: float = 1.0) -> List[Quad]:
    """
    Six quads with three interior valence-3 vertices; the south-west,
    south-east and north-east corners are each shared by two patches.
    """
    SW, SE, NE, NW = (-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)
    S, N = (0.0, -0.5), (0.0, 0.5)
    P1, P2, P3, Q = (-0.2, 0.0), (0.2, -0.1), (0.0, -0.2), (0.2, 0.2)
    quads = [
        (NW, SW, P1, N),
        (SW, S, P3, P1),
        (S, SE, P2, P3),
        (SE, NE, Q, P2),
        (NE, N, P1, Q),
        (P1, P3, P2, Q),
    ]
    return _scaled(quads, length)


def square_layout(length: float = 1.0) -> List[Quad]:
    h = 0.5 * length
    return [rectangle(-h, h, -h, h)]


def _interpolate_curve(space: UnivariateSplineSpace, curve) -> np.ndarray:
    g = greville_abscissae(space)
    values = np.array([curve(s) for s in g])
    return np.linalg.solve(collocation_matrix(space, g), values)


def hole_ring_patches(radius: float = 0.15, length: float = 1.0, elements: int = 4) -> List[TensorSplinePatch]:
    """
    Four planar biquadratic C1 patches between an approximated circle and
    the square [-L/2, L/2]^2. xi1 runs outward, xi2 counterclockwise; the
    inner boundary interpolates the circle at the Greville points.
    """
    space = UnivariateSplineSpace(2, 1, elements)
    h = 0.5 * length

    def inner(s: float) -> np.ndarray:
        angle = (s - 0.5) * np.pi / 2.0
        return radius * np.array([np.cos(angle), np.sin(angle)])

    def outer(s: float) -> np.ndarray:
        return np.array([h, (2.0 * s - 1.0) * h])

    inner_coef = _interpolate_curve(space, inner)
    outer_coef = _interpolate_curve(space, outer)
    g = greville_abscissae(space)
    control = (1.0 - g)[:, None, None] * inner_coef[None] + g[:, None, None] * outer_coef[None]

    patches = []
    for quarter in range(4):
        patches.append(TensorSplinePatch(TensorSplineSpace(space, space), control.copy()))
        control = np.stack([-control[..., 1], control[..., 0]], axis=-1)
    return patches


def lshape_layout(length: float = 255.0, width: float = 30.0) -> List[Quad]:
    """Two bilinear patches meeting along the mitre of the corner square."""
    s = length - width
    return [
        ((0.0, s), (s, s), (length, length), (0.0, length)),
        ((s, 0.0), (length, 0.0), (length, length), (s, s)),
    ]


def lshape_holes_layout(
    length: float = 255.0, width: float = 30.0, hole_length: float = 55.0, hole_width: float = 10.0
) -> List[Quad]:
    """
    25 rectangles: a 3 x 3 grid on the corner square and a 3 x 3 grid on
    each arm with the centre rectangle removed as the hole.
    """
    s = length - width
    margin = 0.5 * (width - hole_width)
    strips = [s, s + margin, s + margin + hole_width, length]
    start = 0.5 * (s - hole_length)
    segments = [0.0, start, start + hole_length, s]

    quads: List[Quad] = []
    for i in range(3):
        for j in range(3):
            if i == 1 and j == 1:
                continue
            quads.append(rectangle(segments[i], segments[i + 1], strips[j], strips[j + 1]))
    for i in range(3):
        for j in range(3):
            quads.append(rectangle(strips[i], strips[i + 1], strips[j], strips[j + 1]))
    for i in range(3):
        for j in range(3):
            if i == 1 and j == 1:
                continue
            quads.append(rectangle(strips[i], strips[i + 1], segments[j], segments[j + 1]))
    return quads


# ----------------------------------------------------------------------
# fixtures

def two_squares() -> MultiPatchSurface:
    """Unit squares [0,1]x[0,1] and [1,2]x[0,1] in z = 0."""
    return planar_surface([rectangle(0.0, 1.0, 0.0, 1.0), rectangle(1.0, 2.0, 0.0, 1.0)])


def flat_cross() -> MultiPatchSurface:
    """Four unit squares around the origin: one interior vertex of valence four."""
    return planar_surface([
        rectangle(0.0, 1.0, 0.0, 1.0),
        rectangle(-1.0, 0.0, 0.0, 1.0),
        rectangle(-1.0, 0.0, -1.0, 0.0),
        rectangle(0.0, 1.0, -1.0, 0.0),
    ])
