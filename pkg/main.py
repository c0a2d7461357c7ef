#!/usr/bin/env python3
"""
C1 Kirchhoff-Love Shell Analysis - Main Application

Entry point for isogeometric shell analysis on AS-G1 multi-patch surfaces:
- Benchmark geometries and geometry files
- C1 spline space construction and checks
- Linear, Newton and arc-length analyses
- CSV, VTK and plot output

Usage:
    python main.py <command> [--config config.yaml] [--case NAME] [--debug]

Commands: solve, converge, path, verify-g1, basis-check, export-geometry.
Exit codes: 0 success, 2 solver failure, 3 input error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional

import structlog

Path("logs").mkdir(exist_ok=True)

# Configure logging first
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    handlers=[
        logging.StreamHandler(sys.stdout),
        logging.FileHandler('logs/c1shell.log', mode='a')
    ]
)

structlog.configure(
    processors=[
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_log_level,
        structlog.processors.KeyValueRenderer(key_order=["event"]),
    ],
    logger_factory=structlog.stdlib.LoggerFactory(),
    wrapper_class=structlog.stdlib.BoundLogger,
    cache_logger_on_first_use=True,
)

logger = logging.getLogger(__name__)

sys.path.insert(0, str(Path(__file__).parent / "src"))

from cli_io import Command, RunConfig, build_run_config, load_config, run  # noqa: E402
from errors import InputError, SolverError  # noqa: E402

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_INPUT = 3


class C1ShellApplication:
    """
    Loads the run configuration and executes CLI subcommands.
    """

    def __init__(self, config_path: Optional[str] = "config/config.yaml"):
        """
        Initialize the application.

        Args:
            config_path: Path to configuration file
        """
        self.config_path = config_path
        self.config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """
        Load configuration from YAML file (defaults when it is missing).

        Returns:
            Dict[str, Any]: Configuration dictionary
        """
        return load_config(self.config_path)

    def run_config(self, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
        return build_run_config(self.config, overrides)

    def execute(self, command: str, overrides: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        config = self.run_config(overrides)
        result = run(config, command)
        for name, path in result.get('outputs', {}).items():
            logger.info(f"✓ {name}: {path}")
        return result


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(
        description="C1 isogeometric Kirchhoff-Love shell analysis"
    )

    parser.add_argument(
        "command",
        choices=[c.value for c in Command],
        help="Subcommand to run"
    )

    parser.add_argument(
        "--config", "-c",
        default="config/config.yaml",
        help="Path to configuration file"
    )

    parser.add_argument(
        "--debug", "-d",
        action="store_true",
        help="Enable debug logging"
    )

    parser.add_argument("--case", help="Benchmark case name")
    parser.add_argument("--geometry", "-g", help="Geometry file used instead of a case")
    parser.add_argument("--degree", "-p", type=int, help="Spline degree")
    parser.add_argument("--regularity", "-r", type=int, help="Spline regularity")
    parser.add_argument("--levels", "-k", type=int, nargs="+", help="Elements per patch direction per level")
    parser.add_argument("--analysis", choices=["linear", "newton", "arclength"], help="Analysis type")
    parser.add_argument("--load-scale", type=float, help="Multiplies the case load")
    parser.add_argument("--ps-ratio", type=float, help="Out-of-plane perturbation ratio of the tip load")
    parser.add_argument("--penalty", type=float, help="Boundary penalty scale")
    parser.add_argument("--workers", "-j", type=int, help="Assembly threads")
    parser.add_argument("--max-steps", type=int, help="Arc-length steps")
    parser.add_argument("--arc-length", type=float, help="Initial arc-length increment")
    parser.add_argument("--output", "-o", help="Output directory")
    parser.add_argument("--vtk-samples", type=int, help="Visualization samples per patch direction")
    parser.add_argument("--no-vtk", action="store_true", help="Skip the VTK stress field")
    parser.add_argument("--no-plots", action="store_true", help="Skip PNG plots")

    return parser.parse_args(argv)


def overrides_from_args(args) -> Dict[str, Any]:
    overrides = {
        "case": args.case,
        "geometry": args.geometry,
        "degree": args.degree,
        "regularity": args.regularity,
        "levels": args.levels,
        "analysis": args.analysis,
        "load_scale": args.load_scale,
        "perturbation_ratio": args.ps_ratio,
        "penalty": args.penalty,
        "workers": args.workers,
        "arc_length.max_steps": args.max_steps,
        "arc_length.arc_length": args.arc_length,
        "output.directory": args.output,
        "output.vtk_samples": args.vtk_samples,
        "output.vtk": False if args.no_vtk else None,
        "output.plots": False if args.no_plots else None,
    }
    return overrides


def main(argv=None) -> int:
    """Main application entry point."""
    args = parse_arguments(argv)

    # Set debug logging if requested
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)
        logger.info("Debug logging enabled")

    try:
        app = C1ShellApplication(config_path=args.config)
        app.execute(args.command, overrides_from_args(args))
    except SolverError as e:
        logger.error(f"✗ Solver failure: {e}")
        return EXIT_SOLVER
    except (InputError, ValueError) as e:
        logger.error(f"✗ Input error: {e}")
        return EXIT_INPUT
    except KeyboardInterrupt:
        logger.info("Received keyboard interrupt")
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
