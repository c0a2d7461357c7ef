"""
C1 Basis Module

C1-smooth isogeometric spaces over AS-G1 multi-patch surfaces:
- Patch, edge and vertex basis functions
- Sparse extraction to per-patch B-spline coefficients
- Evaluation, least-squares fitting and prolongation between meshes
"""

from .models import BasisKind, C1BasisFunction
from .construction import C1Construction, VertexFan, VERTEX_INDICES, edge_indices, patch_indices
from .space import C1Space, build_c1_space, check_parameters, expected_dimension, prolongation_matrix
from .checks import C1CheckReport, InterfaceJump, check_c1

__all__ = [
    'BasisKind',
    'C1BasisFunction',
    'C1Construction',
    'VertexFan',
    'VERTEX_INDICES',
    'edge_indices',
    'patch_indices',
    'C1Space',
    'build_c1_space',
    'check_parameters',
    'expected_dimension',
    'prolongation_matrix',
    'C1CheckReport',
    'InterfaceJump',
    'check_c1',
]
