"""
Gluing Data Module

Gluing functions of analysis-suitable G1 interfaces:
- Linear alpha, quadratic beta and its minimum-norm split
- AS-G1 verification report
- Interface-row linearization of nearly AS-G1 surfaces
"""

from .models import EdgeGluingData, EdgeReport, GluingReport
from .gluing import (
    compute_gluing,
    compute_all_gluing,
    glue_standard_pair,
    fit_standard_pair,
    gluing_residual,
    interface_tangents,
    split_beta,
    verify_as_g1,
)
from .linearize import as_g1_linearize, fit_edge_gluing, transversal_maps

__all__ = [
    'EdgeGluingData',
    'EdgeReport',
    'GluingReport',
    'compute_gluing',
    'compute_all_gluing',
    'glue_standard_pair',
    'fit_standard_pair',
    'gluing_residual',
    'interface_tangents',
    'split_beta',
    'verify_as_g1',
    'as_g1_linearize',
    'fit_edge_gluing',
    'transversal_maps',
]
