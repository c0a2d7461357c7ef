"""
Kirchhoff-Love Shell Module

Discrete shell operators over C1 spaces:
- Material, loads and weak boundary conditions
- Fundamental forms, strains and their variations
- Residual, tangent stiffness and energy assembly
- Membrane stress recovery
"""

from .models import BoundaryKind, ShellMaterial, PointLoad, LoadCase, EdgeCondition, BoundaryConditionSet
from .state import ShellState, split_components, join_components
from .kinematics import (
    DEFORMED,
    UNDEFORMED,
    FundamentalForms,
    ElementKinematics,
    fundamental_forms,
    strains,
    normal_rotation,
)
from .assembler import AssemblyKind, ShellModel, assemble, strain_energy
from .stress import membrane_stress, von_mises_membrane, sample_von_mises

__all__ = [
    'BoundaryKind',
    'ShellMaterial',
    'PointLoad',
    'LoadCase',
    'EdgeCondition',
    'BoundaryConditionSet',
    'ShellState',
    'split_components',
    'join_components',
    'DEFORMED',
    'UNDEFORMED',
    'FundamentalForms',
    'ElementKinematics',
    'fundamental_forms',
    'strains',
    'normal_rotation',
    'AssemblyKind',
    'ShellModel',
    'assemble',
    'strain_energy',
    'membrane_stress',
    'von_mises_membrane',
    'sample_von_mises',
]
