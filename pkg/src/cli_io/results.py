"""
Result Files

Convergence and load-path CSV tables, legacy VTK stress fields and PNG
plots. Every table starts with a versioned comment line; non-finite
numbers abort the write.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Union

import numpy as np

from errors import SolverError
from kl_shell import ShellMaterial, ShellState, sample_von_mises
from solvers import ContinuationPath
from spline_core import eval_patch_grid

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CONVERGENCE_COLUMNS = ["level", "dofs", "w_A", "B"]
PATH_COLUMNS = ["step", "lambda", "u_monitor", "w_monitor"]
VTK_SCALAR = "von_mises_membrane_MPa"


@dataclass
class ConvergenceRow:
    """Result of one refinement level of a linear study."""

    level: int
    elements: int
    dofs: int
    w_A: float
    B: float


def _check_finite(values: Iterable[float], what: str):
    values = np.asarray(list(values), dtype=float)
    if not np.all(np.isfinite(values)):
        raise SolverError(f"non-finite value in {what}; refusing to write results")


def _format(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12e}"


def _write_table(path: Path, kind: str, columns: List[str], rows: Sequence[Sequence]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        f.write(f"# c1shell {kind} v{SCHEMA_VERSION}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])
    logger.info(f"✓ Wrote {len(rows)} row(s) to {path}")
    return path


def write_convergence_csv(path: Union[str, Path], rows: Sequence[ConvergenceRow]) -> Path:
    """Columns level, dofs, w_A, B."""
    table = [(row.level, row.dofs, row.w_A, row.B) for row in rows]
    _check_finite((v for row in table for v in row), "convergence table")
    return _write_table(Path(path), "convergence", CONVERGENCE_COLUMNS, table)


def write_path_csv(path: Union[str, Path], continuation: ContinuationPath) -> Path:
    """
    Columns step, lambda, u_monitor, w_monitor; the monitor is the
    displacement vector at the case monitor point.
    """
    table = []
    for index, point in enumerate(continuation.points):
        monitors = np.asarray(point.monitors, dtype=float)
        u = float(monitors[0]) if monitors.size > 0 else 0.0
        w = float(monitors[2]) if monitors.size > 2 else 0.0
        table.append((index, point.lam, u, w))
    _check_finite((v for row in table for v in row), "load path")
    return _write_table(Path(path), "path", PATH_COLUMNS, table)


def read_table(path: Union[str, Path]) -> List[dict]:
    """Rows of a table written here, as dictionaries of floats."""
    with open(path, 'r', newline='') as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.DictReader(lines)
    return [{key: float(value) for key, value in row.items()} for row in reader]


def write_vtk(
    path: Union[str, Path],
    state: ShellState,
    material: ShellMaterial,
    stress_scale: float = 1.0,
    samples: int = 17,
    deformed: bool = False,
) -> Path:
    """
    Legacy ASCII VTK POLYDATA with the membrane von Mises stress as point data.

    Each patch is sampled on a samples x samples grid and split into quads.
    """
    path = Path(path)
    ts = np.linspace(0.0, 1.0, samples)
    points, polygons, stresses, displacements = [], [], [], []
    offset = 0
    for patch, geometry in enumerate(state.space.surface.patches):
        grid = eval_patch_grid(geometry, ts, ts, 0)[0, 0]
        disp = np.array([[state.displacement(patch, (a, b)) for b in ts] for a in ts])
        xyz = grid + disp if deformed else grid
        points.append(xyz.reshape(-1, 3))
        displacements.append(disp.reshape(-1, 3))
        stresses.append(sample_von_mises(state, material, patch, samples, stress_scale).ravel())
        for i in range(samples - 1):
            for j in range(samples - 1):
                a = offset + i * samples + j
                polygons.append((a, a + samples, a + samples + 1, a + 1))
        offset += samples * samples

    points = np.concatenate(points)
    stresses = np.concatenate(stresses)
    displacements = np.concatenate(displacements)
    _check_finite(stresses, "stress field")
    _check_finite(points.ravel(), "visualization points")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w') as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"c1shell membrane von Mises stress v{SCHEMA_VERSION}\n")
        f.write("ASCII\nDATASET POLYDATA\n")
        f.write(f"POINTS {len(points)} double\n")
        for x in points:
            f.write(f"{x[0]:.10e} {x[1]:.10e} {x[2]:.10e}\n")
        f.write(f"POLYGONS {len(polygons)} {5 * len(polygons)}\n")
        for quad in polygons:
            f.write("4 " + " ".join(str(v) for v in quad) + "\n")
        f.write(f"POINT_DATA {len(points)}\n")
        f.write(f"SCALARS {VTK_SCALAR} double 1\nLOOKUP_TABLE default\n")
        for s in stresses:
            f.write(f"{s:.10e}\n")
        f.write("VECTORS displacement double\n")
        for d in displacements:
            f.write(f"{d[0]:.10e} {d[1]:.10e} {d[2]:.10e}\n")
    logger.info(f"✓ Wrote stress field ({len(points)} points, max {stresses.max():.4g} MPa) to {path}")
    return path


def plot_convergence(path: Union[str, Path], rows: Sequence[ConvergenceRow], reference: Sequence[ConvergenceRow] = ()) -> Path:
    """w_A and B against the number of unknowns."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    for ax, key, label in ((axes[0], "w_A", "w_A"), (axes[1], "B", "strain energy B")):
        ax.semilogx([r.dofs for r in rows], [getattr(r, key) for r in rows], "o-", label="multi-patch")
        if reference:
            ax.axhline(getattr(reference[-1], key), color="k", linestyle="--", label="reference")
        ax.set_xlabel("unknowns")
        ax.set_ylabel(label)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_path(path: Union[str, Path], continuation: ContinuationPath, load: float = 1.0) -> Path:
    """Load against the in-plane and out-of-plane monitor displacements."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    monitors = continuation.monitors
    lam = continuation.lambdas * load
    fig, ax = plt.subplots(figsize=(6, 4))
    if monitors.ndim == 2 and monitors.shape[1] >= 3:
        ax.plot(monitors[:, 0], lam, "o-", markersize=3, label="u")
        ax.plot(monitors[:, 2], lam, "s-", markersize=3, label="w")
    for point in continuation.limit_points:
        ax.axhline(point.lam * load, color="r", linestyle=":", label=f"limit {point.lam * load:.4g}")
    ax.set_xlabel("displacement")
    ax.set_ylabel("load")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
