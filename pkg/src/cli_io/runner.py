"""
Analysis Driver

Runs the CLI subcommands on a benchmark case or a geometry file and writes
their result files.
"""

import logging
from dataclasses import replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from c1_basis import C1Space, build_c1_space, check_c1
from errors import ArcLengthError, ConstructionError, NotASG1Error, ParameterError
from geometry_factory import BenchmarkCase, MonitorPoint, make_case
from gluing_data import compute_all_gluing, verify_as_g1
from kl_shell import ShellModel, ShellState, strain_energy
from multipatch_topology import build_topology
from solvers import ArcLengthSolver, ContinuationPath, newton, solve_linear
from spline_core import eval_patch
from .config import AnalysisType, RunConfig
from .geometry_file import read_geometry_file, write_geometry
from .results import (
    ConvergenceRow,
    plot_convergence,
    plot_path,
    write_convergence_csv,
    write_path_csv,
    write_vtk,
)

logger = logging.getLogger(__name__)


class Command(str, Enum):
    """CLI subcommands."""
    SOLVE = "solve"
    CONVERGE = "converge"
    PATH = "path"
    VERIFY_G1 = "verify-g1"
    BASIS_CHECK = "basis-check"
    EXPORT_GEOMETRY = "export-geometry"


def load_case(config: RunConfig) -> BenchmarkCase:
    """
    The benchmark case of a run, with configuration overrides applied.

    A geometry file replaces the case surface; material, loads and boundary
    conditions then have to come from the configuration.
    """
    if config.geometry is not None:
        contents = read_geometry_file(config.geometry)
        surface = contents.surface
        topology = build_topology(surface)
        center = eval_patch(surface[0], (0.5, 0.5)).point
        case = BenchmarkCase(
            name=Path(config.geometry).stem,
            surface=surface,
            topology=topology,
            material=config.material,
            loads=config.loads,
            bcs=config.boundary,
            monitors=[MonitorPoint("center", 0, (0.5, 0.5), tuple(float(c) for c in center))],
            analysis=config.analysis.value,
        )
        return case

    case = make_case(config.case, config.load_scale, config.perturbation_ratio, config.penalty)
    overrides = {
        key: value
        for key, value in (("material", config.material), ("loads", config.loads), ("bcs", config.boundary))
        if value is not None
    }
    return replace(case, **overrides) if overrides else case


def _require_mechanics(case: BenchmarkCase):
    missing = [name for name in ("material", "loads", "bcs") if getattr(case, name) is None]
    if missing:
        raise ParameterError(f"geometry file runs need {', '.join(missing)} in the configuration")


def build_space(case: BenchmarkCase, config: RunConfig, elements: int) -> C1Space:
    return build_c1_space(
        case.surface, case.topology, None, config.degree, config.regularity, elements, workers=config.workers,
    )


def build_model(case: BenchmarkCase, config: RunConfig, elements: int) -> ShellModel:
    _require_mechanics(case)
    space = build_space(case, config, elements)
    return ShellModel(space, case.material, case.loads, case.bcs, config.workers)


def _monitor(model: ShellModel, point: MonitorPoint, u: np.ndarray) -> np.ndarray:
    return model.monitor(u, point.patch, point.xi)


def solve_level(case: BenchmarkCase, config: RunConfig, level: int, elements: int) -> Tuple[ShellModel, np.ndarray, ConvergenceRow]:
    """One linear or Newton solve on k = elements."""
    model = build_model(case, config, elements)
    if config.analysis == AnalysisType.NEWTON:
        result = newton(model, np.zeros(model.n_dofs), config.newton)
        u = result.u
        lam = case.loads.load_factor
        B = model.energy(u, lam) + model.external_force(lam) @ u
        logger.info(f"Newton converged in {result.iterations} iteration(s), residual {result.final_residual:.3e}")
    else:
        K, F = model.linear_system()
        u = solve_linear(K, F)
        B = strain_energy(ShellState(model.space, u), K)
    w_A = float(_monitor(model, case.monitor, u)[2])
    row = ConvergenceRow(level=level, elements=elements, dofs=model.n_dofs, w_A=w_A, B=float(B))
    logger.info(f"Level {level} (k = {elements}): {row.dofs} unknowns, w_A = {row.w_A:.6e}, B = {row.B:.6e}")
    return model, u, row


def _export_field(case: BenchmarkCase, config: RunConfig, model: ShellModel, u: np.ndarray, label: str) -> Optional[Path]:
    if not config.output.vtk:
        return None
    path = config.output_dir / f"{case.name}_{label}.vtk"
    return write_vtk(path, ShellState(model.space, u), case.material, case.stress_scale, config.output.vtk_samples)


def run_solve(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    elements = config.levels[-1]
    model, u, row = solve_level(case, config, 0, elements)
    outputs = {'table': write_convergence_csv(config.output_dir / f"{case.name}_solve.csv", [row])}
    vtk = _export_field(case, config, model, u, f"k{elements}")
    if vtk is not None:
        outputs['vtk'] = vtk
    return {'rows': [row], 'outputs': outputs}


def run_converge(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    """Uniform h-refinement over config.levels."""
    rows: List[ConvergenceRow] = []
    model = u = None
    for level, elements in enumerate(config.levels):
        model, u, row = solve_level(case, config, level, elements)
        rows.append(row)
    outputs = {'table': write_convergence_csv(config.output_dir / f"{case.name}_convergence.csv", rows)}
    if config.output.plots:
        outputs['plot'] = plot_convergence(config.output_dir / f"{case.name}_convergence.png", rows)
    vtk = _export_field(case, config, model, u, f"k{config.levels[-1]}")
    if vtk is not None:
        outputs['vtk'] = vtk
    return {'rows': rows, 'outputs': outputs}


def _write_path(case: BenchmarkCase, config: RunConfig, path: ContinuationPath) -> Dict[str, Path]:
    outputs = {'table': write_path_csv(config.output_dir / f"{case.name}_path.csv", path)}
    if config.output.plots and len(path) > 1:
        outputs['plot'] = plot_path(config.output_dir / f"{case.name}_path.png", path)
    return outputs


def run_path(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    """Arc-length continuation on the finest level; a stalled path is written before the error propagates."""
    model = build_model(case, config, config.levels[-1])
    solver = ArcLengthSolver(model, config.arc_length, lambda u: _monitor(model, case.monitor, u))
    try:
        path = solver.run()
    except ArcLengthError as e:
        if e.path is not None and len(e.path) > 0:
            _write_path(case, config, e.path)
            logger.error(f"✗ Continuation stopped after {len(e.path) - 1} step(s); partial path written")
        raise

    for point in path.limit_points:
        logger.info(f"✓ Limit point at lambda = {point.lam:.6g} (step {point.step})")
    outputs = _write_path(case, config, path)
    last = path.points[-1]
    vtk = _export_field(case, config, model, last.u, "path_end")
    if vtk is not None:
        outputs['vtk'] = vtk
    return {'path': path, 'outputs': outputs}


def run_verify_g1(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    report = verify_as_g1(case.surface, case.topology)
    for edge in report.edges:
        if edge.interface:
            marker = "✓" if edge.passed else "✗"
            logger.info(f"{marker} edge {edge.edge}: residual {edge.residual:.3e} {edge.message}".rstrip())
    if not report.passed:
        raise NotASG1Error(f"{len(report.failed)} interface(s) are not AS-G1", report.max_residual)
    logger.info(f"✓ {case.name}: all {len(case.topology.interfaces)} interface(s) are AS-G1")
    return {'report': report}


def run_basis_check(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    reports = []
    for elements in config.levels:
        space = build_space(case, config, elements)
        report = check_c1(space)
        reports.append(report)
        marker = "✓" if report.passed else "✗"
        logger.info(
            f"{marker} k = {elements}: dimension {report.dimension} (formula {report.expected_dimension}), "
            f"value jump {report.max_value_jump:.2e}, gradient jump {report.max_gradient_jump:.2e}"
        )
        if not report.passed:
            raise ConstructionError(f"C1 check failed on {case.name} with k = {elements}")
    return {'reports': reports}


def run_export_geometry(case: BenchmarkCase, config: RunConfig) -> Dict[str, Any]:
    gluing = compute_all_gluing(case.surface, case.topology)
    path = write_geometry(config.output_dir / f"{case.name}.geo", case.surface, case.topology, gluing)
    return {'outputs': {'geometry': path}}


COMMANDS = {
    Command.SOLVE: run_solve,
    Command.CONVERGE: run_converge,
    Command.PATH: run_path,
    Command.VERIFY_G1: run_verify_g1,
    Command.BASIS_CHECK: run_basis_check,
    Command.EXPORT_GEOMETRY: run_export_geometry,
}


def run(config: RunConfig, command: Optional[str] = None) -> Dict[str, Any]:
    """
    Execute one subcommand.

    Without a command, the analysis type picks converge (linear, newton) or
    path (arclength).

    Raises:
        InputError subclasses for invalid input, SolverError subclasses when
        the analysis does not converge
    """
    if command is None:
        command = Command.PATH if config.analysis == AnalysisType.ARCLENGTH else Command.CONVERGE
    command = Command(command)
    if command == Command.SOLVE and config.analysis == AnalysisType.ARCLENGTH:
        command = Command.PATH

    case = load_case(config)
    logger.info(f"Running {command.value} on {case.name}: {case.summary()}")
    config.output_dir.mkdir(parents=True, exist_ok=True)
    result = COMMANDS[command](case, config)
    result['case'] = case
    return result
