"""
CLI and I/O Module

File formats and the analysis driver:
- Geometry file reading and writing
- YAML run configuration
- Convergence and load-path tables, VTK stress fields, plots
- Subcommand execution
"""

from .geometry_file import GeometryFile, parse_geometry, parse_geometry_text, read_geometry_file, write_geometry
from .config import AnalysisType, OutputSettings, RunConfig, build_run_config, create_default_config, load_config
from .results import (
    CONVERGENCE_COLUMNS,
    PATH_COLUMNS,
    VTK_SCALAR,
    ConvergenceRow,
    plot_convergence,
    plot_path,
    read_table,
    write_convergence_csv,
    write_path_csv,
    write_vtk,
)
from .runner import COMMANDS, Command, build_model, build_space, load_case, run, solve_level

__all__ = [
    'GeometryFile',
    'parse_geometry',
    'parse_geometry_text',
    'read_geometry_file',
    'write_geometry',
    'AnalysisType',
    'OutputSettings',
    'RunConfig',
    'build_run_config',
    'create_default_config',
    'load_config',
    'CONVERGENCE_COLUMNS',
    'PATH_COLUMNS',
    'VTK_SCALAR',
    'ConvergenceRow',
    'plot_convergence',
    'plot_path',
    'read_table',
    'write_convergence_csv',
    'write_path_csv',
    'write_vtk',
    'COMMANDS',
    'Command',
    'build_model',
    'build_space',
    'load_case',
    'run',
    'solve_level',
]
