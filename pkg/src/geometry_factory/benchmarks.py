"""
Benchmark Cases

Surfaces, material, loads and boundary conditions of the hyperboloid and
L-shaped strip problems. Every case is checked for the AS-G1 property
before it is handed out.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from errors import FactoryInvariantError, InputError, ParameterError
from gluing_data import as_g1_linearize, verify_as_g1
from kl_shell import BoundaryConditionSet, LoadCase, PointLoad, ShellMaterial
from multipatch_topology import MultiPatchSurface, Topology, build_topology, locate_point, select_boundary_edges
from spline_core import TensorSplinePatch, eval_patch
from .compose import PolynomialSurface, compose_multipatch, embed_planar
from .layouts import (
    bilinear_patch,
    hole_ring_patches,
    hyperboloid_layout_1,
    hyperboloid_layout_2,
    lshape_holes_layout,
    lshape_layout,
    planar_surface,
    square_layout,
)

logger = logging.getLogger(__name__)

AS_G1_TOL = 1e-10

# hyperboloid data (N, m)
HYPERBOLOID_LENGTH = 1.0
HYPERBOLOID_THICKNESS = 0.01
HYPERBOLOID_MATERIAL = dict(youngs_modulus=2e11, poisson_ratio=0.3, thickness=HYPERBOLOID_THICKNESS)
HYPERBOLOID_PRESSURE = -8000.0 * HYPERBOLOID_THICKNESS
HOLE_RADIUS = 0.15

# L-shape data (N, mm)
LSHAPE_LENGTH = 255.0
LSHAPE_WIDTH = 30.0
LSHAPE_MATERIAL = dict(youngs_modulus=71240.0, poisson_ratio=0.31, thickness=0.6)
LSHAPE_LOAD = 1.0
LSHAPE_PERTURBATION = 1e-3
HOLE_LENGTH = 55.0
HOLE_WIDTH = 10.0


@dataclass(frozen=True)
class MonitorPoint:
    """Named surface point at which displacements are reported."""

    name: str
    patch: int
    xi: Tuple[float, float]
    point: Tuple[float, float, float]


@dataclass
class BenchmarkCase:
    """
    A benchmark problem ready for analysis.

    Attributes:
        name: Case identifier
        surface: AS-G1 multi-patch surface
        topology: Its topology
        material: Shell material
        loads: Load case (scaled part multiplied by lambda)
        bcs: Weak boundary conditions
        monitors: Reference points, the first one is point A
        analysis: Default analysis type ('linear' or 'arclength')
        stress_scale: Factor converting stresses to MPa
        reference: Name of the case providing reference values, if any
    """

    name: str
    surface: MultiPatchSurface
    topology: Topology
    material: ShellMaterial
    loads: LoadCase
    bcs: BoundaryConditionSet
    monitors: List[MonitorPoint]
    analysis: str = "linear"
    stress_scale: float = 1.0
    reference: Optional[str] = None
    description: str = ""
    metadata: Dict[str, float] = field(default_factory=dict)

    @property
    def monitor(self) -> MonitorPoint:
        return self.monitors[0]

    def summary(self) -> dict:
        return {
            'name': self.name,
            'patches': len(self.surface),
            'interfaces': len(self.topology.interfaces),
            'inner_vertices': len(self.topology.inner_vertices),
            'clamped_edges': len(self.bcs.edges) if self.bcs is not None else 0,
            'analysis': self.analysis,
        }


def _monitor(name: str, surface: MultiPatchSurface, planar: Tuple[float, float]) -> MonitorPoint:
    patch, xi = locate_point(surface.patches, np.asarray(planar))
    point = eval_patch(surface[patch], xi).point
    return MonitorPoint(name, patch, xi, tuple(float(c) for c in point))


def _clamped_at(surface: MultiPatchSurface, topology: Topology, axis: int, value: float, penalty: float) -> BoundaryConditionSet:
    tol = 1e-9 * max(surface.bounding_box_diagonal, 1.0)
    sides = select_boundary_edges(surface, topology, lambda x: abs(x[axis] - value) <= tol)
    if not sides:
        raise FactoryInvariantError(f"no boundary edge found at x{axis + 1} = {value}")
    return BoundaryConditionSet.clamped(sides, penalty)


def _checked(name: str, surface: MultiPatchSurface) -> Tuple[MultiPatchSurface, Topology]:
    if not surface.is_regular():
        raise FactoryInvariantError(f"{name}: degenerate patch parameterization")
    try:
        topology = build_topology(surface)
    except InputError as e:
        raise FactoryInvariantError(f"{name}: layout is not conforming: {e}") from e
    report = verify_as_g1(surface, topology, AS_G1_TOL)
    if not report.passed:
        raise FactoryInvariantError(
            f"{name}: {len(report.failed)} interface(s) fail the AS-G1 check "
            f"(max residual {report.max_residual:.3e})"
        )
    logger.debug(f"{name}: {len(surface)} patches, AS-G1 residual {report.max_residual:.2e}")
    return surface, topology


# ----------------------------------------------------------------------
# surfaces

def hyperboloid_surface(quads) -> MultiPatchSurface:
    """Bilinear planar layout lifted onto z = x^2 - y^2."""
    return compose_multipatch(PolynomialSurface.hyperbolic(), [bilinear_patch(q) for q in quads])


def hole_ring_surface(radius: float = HOLE_RADIUS, length: float = HYPERBOLOID_LENGTH) -> MultiPatchSurface:
    """
    Planar C1 ring around the approximated disk, linearized to AS-G1 in the
    plane and then lifted onto the hyperbolic surface.
    """
    planar = MultiPatchSurface([embed_planar(p) for p in hole_ring_patches(radius, length)])
    planar = as_g1_linearize(planar, build_topology(planar), AS_G1_TOL)
    flat = [TensorSplinePatch(p.space, p.control[..., :2]) for p in planar.patches]
    return compose_multipatch(PolynomialSurface.hyperbolic(), flat)


# ----------------------------------------------------------------------
# cases

def _hyperboloid_case(name: str, surface: MultiPatchSurface, load_scale: float, penalty: float, **kwargs) -> BenchmarkCase:
    surface, topology = _checked(name, surface)
    h = 0.5 * HYPERBOLOID_LENGTH
    monitors = kwargs.pop("monitors", None) or [_monitor("A", surface, (h, 0.0))]
    metadata = kwargs.pop("metadata", {'length': HYPERBOLOID_LENGTH})
    return BenchmarkCase(
        name=name,
        surface=surface,
        topology=topology,
        material=ShellMaterial(**HYPERBOLOID_MATERIAL),
        loads=LoadCase(surface_load=(0.0, 0.0, HYPERBOLOID_PRESSURE * load_scale)),
        bcs=_clamped_at(surface, topology, 0, -h, penalty),
        monitors=monitors,
        analysis="linear",
        stress_scale=1e-6,
        metadata=metadata,
        **kwargs,
    )


def _hyperboloid_6p_1(load_scale: float, penalty: float, **_) -> BenchmarkCase:
    return _hyperboloid_case(
        "hyperboloid_6p_1", hyperboloid_surface(hyperboloid_layout_1(HYPERBOLOID_LENGTH)), load_scale, penalty,
        reference="single_patch_hyperboloid",
        description="hyperbolic paraboloid, 6 patches, two interior valence-3 vertices",
    )


def _hyperboloid_6p_2(load_scale: float, penalty: float, **_) -> BenchmarkCase:
    return _hyperboloid_case(
        "hyperboloid_6p_2", hyperboloid_surface(hyperboloid_layout_2(HYPERBOLOID_LENGTH)), load_scale, penalty,
        reference="single_patch_hyperboloid",
        description="hyperbolic paraboloid, 6 patches, interior and boundary extraordinary vertices",
    )


def _single_patch_hyperboloid(load_scale: float, penalty: float, **_) -> BenchmarkCase:
    return _hyperboloid_case(
        "single_patch_hyperboloid", hyperboloid_surface(square_layout(HYPERBOLOID_LENGTH)), load_scale, penalty,
        description="hyperbolic paraboloid, single patch reference",
    )


def _hyperboloid_hole_4p(load_scale: float, penalty: float, **_) -> BenchmarkCase:
    surface = hole_ring_surface()
    # inner boundary of the ring patch facing +x, at the middle of the arc
    point = eval_patch(surface[0], (0.0, 0.5)).point
    monitor = MonitorPoint("A", 0, (0.0, 0.5), tuple(float(c) for c in point))
    return _hyperboloid_case(
        "hyperboloid_hole_4p", surface, load_scale, penalty,
        monitors=[monitor],
        description=f"hyperbolic paraboloid with a hole of radius {HOLE_RADIUS}, 4 patches",
        metadata={'length': HYPERBOLOID_LENGTH, 'radius': HOLE_RADIUS},
    )


def _lshape_case(name: str, quads, load_scale: float, perturbation_ratio: float, penalty: float, description: str) -> BenchmarkCase:
    surface, topology = _checked(name, planar_surface(quads))
    tip = (LSHAPE_LENGTH - 0.5 * LSHAPE_WIDTH, 0.0)
    monitor = _monitor("tip", surface, tip)
    load = LSHAPE_LOAD * load_scale
    return BenchmarkCase(
        name=name,
        surface=surface,
        topology=topology,
        material=ShellMaterial(**LSHAPE_MATERIAL),
        loads=LoadCase(point_loads=[
            PointLoad(patch=monitor.patch, xi=monitor.xi, force=(load, 0.0, perturbation_ratio * load), scaled=True),
        ]),
        bcs=_clamped_at(surface, topology, 0, 0.0, penalty),
        monitors=[monitor],
        analysis="arclength",
        stress_scale=1.0,
        description=description,
        metadata={'length': LSHAPE_LENGTH, 'width': LSHAPE_WIDTH, 'perturbation_ratio': perturbation_ratio},
    )


def _lshape_2p(load_scale: float, penalty: float, perturbation_ratio: float = LSHAPE_PERTURBATION, **_) -> BenchmarkCase:
    return _lshape_case(
        "lshape_2p", lshape_layout(LSHAPE_LENGTH, LSHAPE_WIDTH), load_scale, perturbation_ratio, penalty,
        "L-shaped strip, 2 bilinear patches, in-plane tip load",
    )


def _lshape_holes_25p(load_scale: float, penalty: float, perturbation_ratio: float = LSHAPE_PERTURBATION, **_) -> BenchmarkCase:
    return _lshape_case(
        "lshape_holes_25p", lshape_holes_layout(LSHAPE_LENGTH, LSHAPE_WIDTH, HOLE_LENGTH, HOLE_WIDTH),
        load_scale, perturbation_ratio, penalty,
        "L-shaped strip with two holes, 25 bilinear patches, in-plane tip load",
    )


CASES: Dict[str, Callable[..., BenchmarkCase]] = {
    'hyperboloid_6p_1': _hyperboloid_6p_1,
    'hyperboloid_6p_2': _hyperboloid_6p_2,
    'hyperboloid_hole_4p': _hyperboloid_hole_4p,
    'lshape_2p': _lshape_2p,
    'lshape_holes_25p': _lshape_holes_25p,
    'single_patch_hyperboloid': _single_patch_hyperboloid,
}


def make_case(
    name: str,
    load_scale: float = 1.0,
    perturbation_ratio: float = LSHAPE_PERTURBATION,
    penalty: float = 1e4,
) -> BenchmarkCase:
    """
    Build a benchmark case by name.

    Args:
        name: One of CASES
        load_scale: Multiplies the reference load
        perturbation_ratio: Out-of-plane over in-plane tip load (L-shapes)
        penalty: Boundary penalty scale

    Raises:
        ParameterError: Unknown case name
        FactoryInvariantError: Geometry fails conformity or AS-G1 verification
    """
    try:
        builder = CASES[name]
    except KeyError:
        raise ParameterError(f"unknown case '{name}' (available: {', '.join(sorted(CASES))})") from None
    case = builder(load_scale=load_scale, penalty=penalty, perturbation_ratio=perturbation_ratio)
    logger.info(f"✓ Built case {name}: {len(case.surface)} patches, {len(case.topology.inner_vertices)} inner vertices")
    return case
