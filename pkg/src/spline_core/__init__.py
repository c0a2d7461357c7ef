"""
Spline Core Module

B-spline spaces and patches:
- Open uniform univariate spaces S^{p,r} and tensor products
- Basis and patch evaluation with derivatives
- Exact refinement (knot insertion, degree elevation)
- Bezier extraction for element-wise assembly
- Boundary M functions of the C1 construction
"""

from .univariate import (
    UnivariateSplineSpace,
    eval_basis,
    greville_abscissae,
    collocation_matrix,
    collocation_tables,
)
from .tensor import (
    TensorSplineSpace,
    TensorSplinePatch,
    ScalarSplineFunction,
    PatchEvaluation,
    eval_patch,
    eval_patch_grid,
)
from .m_functions import MFamily, m_function, m_coefficients, m_table, family_space
from .refinement import refine, prolongation, refined_space
from .bezier import compute_bezier_extraction_1d, bernstein, element_rules, ElementRule

__all__ = [
    'UnivariateSplineSpace',
    'eval_basis',
    'greville_abscissae',
    'collocation_matrix',
    'collocation_tables',
    'TensorSplineSpace',
    'TensorSplinePatch',
    'ScalarSplineFunction',
    'PatchEvaluation',
    'eval_patch',
    'eval_patch_grid',
    'MFamily',
    'm_function',
    'm_coefficients',
    'm_table',
    'family_space',
    'refine',
    'prolongation',
    'refined_space',
    'compute_bezier_extraction_1d',
    'bernstein',
    'element_rules',
    'ElementRule',
]
