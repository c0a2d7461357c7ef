"""
Multi-Patch Topology Module

Conforming multi-patch surfaces:
- Side matching into interfaces and boundary edges
- Counterclockwise vertex fans
- Standard forms of edges and vertices
- Point location and boundary selection helpers
"""

from .models import (
    Side,
    ParamTransform,
    IDENTITY,
    Edge,
    FanEntry,
    Vertex,
    MultiPatchSurface,
    Topology,
    corner_sides,
)
from .standard_form import (
    EdgeStandardForm,
    VertexStandardForm,
    standard_form_edge,
    standard_form_vertex,
    transform_for_side,
    transform_for_corner,
    minimal_rotation,
)
from .topology import build_topology, match_sides_bruteforce, select_boundary_edges, locate_point

__all__ = [
    'Side',
    'ParamTransform',
    'IDENTITY',
    'Edge',
    'FanEntry',
    'Vertex',
    'MultiPatchSurface',
    'Topology',
    'corner_sides',
    'EdgeStandardForm',
    'VertexStandardForm',
    'standard_form_edge',
    'standard_form_vertex',
    'transform_for_side',
    'transform_for_corner',
    'minimal_rotation',
    'build_topology',
    'match_sides_bruteforce',
    'select_boundary_edges',
    'locate_point',
]
