#!/usr/bin/env python3
"""
Test Script for the C1 Shell Analysis System

End-to-end runs of the command line through main(); the benchmark-scale
checks are marked slow.
"""

import logging
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "src"))

from cli_io import read_table  # noqa: E402
from main import EXIT_INPUT, EXIT_OK, EXIT_SOLVER, main  # noqa: E402

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

NO_CONFIG = "nonexistent_config.yaml"


def _cli(tmp_path, *args) -> int:
    return main([*args, "--config", NO_CONFIG, "--output", str(tmp_path)])


def test_verify_g1_command(tmp_path):
    assert _cli(tmp_path, "verify-g1", "--case", "hyperboloid_6p_2") == EXIT_OK
    logger.info("✓ verify-g1 succeeded")


def test_export_and_reload_geometry(tmp_path):
    assert _cli(tmp_path, "export-geometry", "--case", "lshape_2p") == EXIT_OK
    geometry = tmp_path / "lshape_2p.geo"
    assert geometry.exists()
    assert _cli(tmp_path, "verify-g1", "--geometry", str(geometry)) == EXIT_OK


def test_basis_check_command(tmp_path):
    assert _cli(tmp_path, "basis-check", "--case", "lshape_2p", "-p", "3", "-r", "1", "-k", "3") == EXIT_OK


def test_input_errors_exit_with_code_3(tmp_path):
    assert _cli(tmp_path, "verify-g1", "--case", "cylinder") == EXIT_INPUT
    assert _cli(tmp_path, "basis-check", "--case", "lshape_2p", "-p", "3", "-r", "2") == EXIT_INPUT
    assert _cli(tmp_path, "verify-g1", "--geometry", str(tmp_path / "missing.geo")) == EXIT_INPUT
    broken = tmp_path / "broken.geo"
    broken.write_text("C1SHELL-GEOMETRY 1\nPATCHES 1\nPATCH 0\n")
    assert _cli(tmp_path, "verify-g1", "--geometry", str(broken)) == EXIT_INPUT


def test_solver_failure_exits_with_code_2(tmp_path):
    config = tmp_path / "strict.yaml"
    config.write_text("newton:\n  max_iterations: 1\n  tolerance: 1.0e-15\n  absolute_tolerance: 0.0\n")
    code = main([
        "solve", "--config", str(config), "--output", str(tmp_path), "--case", "lshape_2p",
        "-p", "3", "-r", "1", "-k", "3", "--analysis", "newton", "--load-scale", "100", "--no-vtk",
    ])
    assert code == EXIT_SOLVER


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit):
        main(["interpolate"])


def test_interrupt_exits_with_code_2(tmp_path, mocker):
    run = mocker.patch("main.run", side_effect=KeyboardInterrupt)
    assert _cli(tmp_path, "verify-g1", "--case", "lshape_2p") == EXIT_SOLVER
    run.assert_called_once()
    (config, command), _ = run.call_args
    assert command == "verify-g1"
    assert config.case == "lshape_2p"


@pytest.mark.slow
def test_hyperboloid_convergence(tmp_path):
    """Refinement on the six-patch hyperboloid approaches the single-patch value."""
    args = ("converge", "-p", "4", "-r", "2", "-k", "4", "8", "--no-vtk", "--no-plots")
    assert _cli(tmp_path / "multi", *args, "--case", "hyperboloid_6p_1") == EXIT_OK
    assert _cli(tmp_path / "single", *args, "--case", "single_patch_hyperboloid") == EXIT_OK
    multi = read_table(tmp_path / "multi" / "hyperboloid_6p_1_convergence.csv")
    single = read_table(tmp_path / "single" / "single_patch_hyperboloid_convergence.csv")
    assert [row["level"] for row in multi] == [0.0, 1.0]
    error = [abs(m["w_A"] - single[-1]["w_A"]) for m in multi]
    assert error[1] < 0.05 * abs(single[-1]["w_A"])
    assert all(row["B"] > 0.0 for row in multi)


@pytest.mark.slow
def test_lshape_buckling_path(tmp_path):
    """The in-plane tip load leads to lateral buckling: the out-of-plane displacement grows."""
    code = _cli(
        tmp_path, "path", "--case", "lshape_2p", "-p", "3", "-r", "1", "-k", "8",
        "--max-steps", "40", "--no-vtk", "--no-plots",
    )
    assert code == EXIT_OK
    table = read_table(tmp_path / "lshape_2p_path.csv")
    assert len(table) > 10
    assert table[0]["lambda"] == 0.0
    assert abs(table[-1]["w_monitor"]) > 10.0 * abs(table[1]["w_monitor"])


@pytest.mark.slow
@pytest.mark.parametrize("degree, regularity", [(3, 1), (4, 2), (5, 3)])
def test_hyperboloid_convergence_per_degree(tmp_path, degree, regularity):
    """Every degree approaches the single-patch value from the same side as it refines."""
    args = ("converge", "-p", str(degree), "-r", str(regularity), "-k", "4", "8", "--no-plots")
    assert _cli(tmp_path / "multi", *args, "--case", "hyperboloid_6p_2") == EXIT_OK
    assert _cli(tmp_path / "single", *args, "--no-vtk", "--case", "single_patch_hyperboloid") == EXIT_OK
    multi = read_table(tmp_path / "multi" / "hyperboloid_6p_2_convergence.csv")
    single = read_table(tmp_path / "single" / "single_patch_hyperboloid_convergence.csv")
    reference = single[-1]["w_A"]
    assert abs(multi[1]["w_A"] - reference) < abs(multi[0]["w_A"] - reference)
    assert multi[1]["dofs"] > multi[0]["dofs"]
    vtk = (tmp_path / "multi" / "hyperboloid_6p_2_k8.vtk").read_text()
    assert "von_mises_membrane_MPa" in vtk
    logger.info(f"✓ p={degree}: w_A {multi[-1]['w_A']:.6e} against {reference:.6e}")


@pytest.mark.slow
def test_hole_convergence(tmp_path):
    """Without a single-patch counterpart the hole case must at least converge monotonically."""
    code = _cli(tmp_path, "converge", "--case", "hyperboloid_hole_4p", "-p", "4", "-r", "2", "-k", "4", "8", "16", "--no-plots")
    assert code == EXIT_OK
    table = read_table(tmp_path / "hyperboloid_hole_4p_convergence.csv")
    w = [row["w_A"] for row in table]
    energy = [row["B"] for row in table]
    assert all(value < 0.0 for value in w)
    assert abs(w[2] - w[1]) < abs(w[1] - w[0])
    assert abs(energy[2] - energy[1]) < abs(energy[1] - energy[0])


@pytest.mark.slow
def test_lshape_with_holes_buckling_path(tmp_path):
    code = _cli(
        tmp_path, "path", "--case", "lshape_holes_25p", "-p", "4", "-r", "2", "-k", "3",
        "--max-steps", "40", "--no-plots",
    )
    assert code == EXIT_OK
    table = read_table(tmp_path / "lshape_holes_25p_path.csv")
    assert len(table) > 10
    assert abs(table[-1]["w_monitor"]) > 10.0 * abs(table[1]["w_monitor"])
    assert (tmp_path / "lshape_holes_25p_path_end.vtk").exists()
