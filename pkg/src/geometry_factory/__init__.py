"""
Geometry Factory Module

Benchmark geometries and their problem data:
- Exact composition of planar spline patches with polynomial surfaces
- Explicit planar multi-patch layouts and test fixtures
- Named benchmark cases with material, loads and boundary conditions
"""

from .compose import PolynomialSurface, compose_surface, compose_multipatch, composed_space, embed_planar
from .layouts import (
    bilinear_patch,
    rectangle,
    planar_surface,
    hyperboloid_layout_1,
    hyperboloid_layout_2,
    square_layout,
    hole_ring_patches,
    lshape_layout,
    lshape_holes_layout,
    two_squares,
    flat_cross,
)
from .benchmarks import (
    AS_G1_TOL,
    CASES,
    BenchmarkCase,
    MonitorPoint,
    hole_ring_surface,
    hyperboloid_surface,
    make_case,
)

__all__ = [
    'PolynomialSurface',
    'compose_surface',
    'compose_multipatch',
    'composed_space',
    'embed_planar',
    'bilinear_patch',
    'rectangle',
    'planar_surface',
    'hyperboloid_layout_1',
    'hyperboloid_layout_2',
    'square_layout',
    'hole_ring_patches',
    'lshape_layout',
    'lshape_holes_layout',
    'two_squares',
    'flat_cross',
    'AS_G1_TOL',
    'CASES',
    'BenchmarkCase',
    'MonitorPoint',
    'hole_ring_surface',
    'hyperboloid_surface',
    'make_case',
]
