"""
Stress Recovery

Membrane stresses in an orthonormal surface frame and their von Mises norm.
"""

from typing import Tuple

import numpy as np

from .kinematics import UNDEFORMED, fundamental_forms, strains
from .models import ShellMaterial
from .state import ShellState


def membrane_stress(state: ShellState, material: ShellMaterial, patch: int, xi: Tuple[float, float]) -> np.ndarray:
    """
    Physical membrane stress n / t in the frame e1 = A1/|A1|, e2 = A3 x e1.

    Returns:
        np.ndarray: Symmetric 2 x 2 stress tensor (force/area)
    """
    ref = fundamental_forms(state, patch, xi, UNDEFORMED)
    eps, _ = strains(state, patch, xi)
    voigt = np.array([eps[0, 0], eps[1, 1], 2.0 * eps[0, 1]])
    n = material.constitutive(ref.metric) @ voigt
    contravariant = np.array([[n[0], n[2]], [n[2], n[1]]])

    e1 = ref.basis[:, 0] / np.linalg.norm(ref.basis[:, 0])
    e2 = np.cross(ref.normal, e1)
    frame = np.stack([e1, e2])          # rows e_i
    transform = frame @ ref.basis       # (e_i . A_a)
    return transform @ contravariant @ transform.T


def von_mises_membrane(
    state: ShellState,
    material: ShellMaterial,
    patch: int,
    xi: Tuple[float, float],
    scale: float = 1.0,
) -> float:
    """
    Von Mises norm of the membrane stress at a point.

    Args:
        scale: Output unit factor (1e-6 turns Pa into MPa)
    """
    s = membrane_stress(state, material, patch, xi)
    value = s[0, 0] ** 2 + s[1, 1] ** 2 - s[0, 0] * s[1, 1] + 3.0 * s[0, 1] ** 2
    return scale * float(np.sqrt(max(value, 0.0)))


def sample_von_mises(state: ShellState, material: ShellMaterial, patch: int, samples: int, scale: float = 1.0) -> np.ndarray:
    """Von Mises membrane stress on a uniform samples x samples grid of one patch."""
    ts = np.linspace(0.0, 1.0, samples)
    return np.array([[von_mises_membrane(state, material, patch, (a, b), scale) for b in ts] for a in ts])
