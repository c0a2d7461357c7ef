#!/usr/bin/env python3
"""
CLI and I/O Test

Geometry files, run configuration, result tables and the subcommand
driver on small cases.
"""

import logging
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from cli_io import (  # noqa: E402
    CONVERGENCE_COLUMNS,
    PATH_COLUMNS,
    AnalysisType,
    ConvergenceRow,
    build_run_config,
    create_default_config,
    load_config,
    parse_geometry_text,
    read_geometry_file,
    read_table,
    run,
    write_convergence_csv,
    write_geometry,
    write_path_csv,
)
from errors import GeometryParseError, ParameterError, SolverError  # noqa: E402
from gluing_data import compute_all_gluing  # noqa: E402
from solvers import ContinuationPath, PathPoint  # noqa: E402

logging.basicConfig(level=logging.INFO, format='%(levelname)s - %(message)s')
logger = logging.getLogger(__name__)


def _config(tmp_path, **overrides):
    values = {"case": "lshape_2p", "degree": 3, "regularity": 1, "levels": [3], "output.directory": str(tmp_path)}
    values.update(overrides)
    return build_run_config(create_default_config(), values)


def test_geometry_file_roundtrip(cross_surface, tmp_path):
    surface, topology = cross_surface
    gluing = compute_all_gluing(surface, topology)
    path = write_geometry(tmp_path / "cross.geo", surface, topology, gluing)
    contents = read_geometry_file(path)

    assert len(contents.surface) == 4
    for written, read in zip(surface.patches, contents.surface.patches):
        np.testing.assert_array_equal(read.space.first.knots, written.space.first.knots)
        np.testing.assert_array_equal(read.control, written.control)
    assert contents.interfaces == [(e.patch1, e.side1, e.patch2, e.side2, e.reversed) for e in topology.interfaces]
    assert len(contents.gluing) == 4
    for data in contents.gluing:
        np.testing.assert_array_equal(data.alpha1.coef, gluing[data.edge].alpha1.coef)
        np.testing.assert_array_equal(data.beta2.coef, gluing[data.edge].beta2.coef)
    logger.info("✓ Geometry file round trip")


def test_geometry_file_errors(two_square_surface, tmp_path):
    surface, _ = two_square_surface
    text = write_geometry(tmp_path / "squares.geo", surface).read_text()
    lines = text.splitlines()

    with pytest.raises(GeometryParseError) as info:
        parse_geometry_text("\n".join(lines[:8]))
    assert info.value.line == 9

    broken = list(lines)
    broken[7] = "nan 0 0"
    with pytest.raises(GeometryParseError) as info:
        parse_geometry_text("\n".join(broken))
    assert info.value.line == 8

    with pytest.raises(GeometryParseError) as info:
        parse_geometry_text("NOT-A-GEOMETRY 1\n" + "\n".join(lines[1:]))
    assert info.value.line == 1

    with pytest.raises(GeometryParseError):
        parse_geometry_text(text + "EXTRA 1\n")
    with pytest.raises(GeometryParseError):
        read_geometry_file(tmp_path / "missing.geo")


def test_config_defaults_and_overrides(tmp_path):
    assert load_config(None) == create_default_config()
    assert load_config(tmp_path / "missing.yaml") == create_default_config()

    config = build_run_config(create_default_config(), {"degree": 3, "regularity": 1, "newton.tolerance": 1e-6, "levels": None})
    assert config.degree == 3
    assert config.newton.tolerance == 1e-6
    assert config.newton.max_iterations == 25
    assert config.levels == [4, 8]
    assert config.analysis == AnalysisType.LINEAR
    assert config.output_dir == Path("results")


def test_config_errors(tmp_path):
    broken = tmp_path / "broken.yaml"
    broken.write_text("levels: [4, 8\n")
    with pytest.raises(ParameterError):
        load_config(broken)
    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ParameterError):
        load_config(listing)

    with pytest.raises(ParameterError):
        build_run_config(create_default_config(), {"regularity": 3})
    with pytest.raises(ParameterError):
        build_run_config(create_default_config(), {"levels": []})
    with pytest.raises(ParameterError):
        build_run_config({"case": None})


def test_yaml_file_is_read(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text("case: lshape_2p\nanalysis: arclength\narc_length:\n  max_steps: 7\n")
    config = build_run_config(load_config(path))
    assert config.analysis == AnalysisType.ARCLENGTH
    assert config.arc_length.max_steps == 7


def test_convergence_table(tmp_path):
    rows = [ConvergenceRow(level=0, elements=4, dofs=300, w_A=-1.5e-4, B=2.25), ConvergenceRow(1, 8, 900, -1.6e-4, 2.5)]
    path = write_convergence_csv(tmp_path / "c.csv", rows)
    assert path.read_text().splitlines()[0] == "# c1shell convergence v1"
    table = read_table(path)
    assert list(table[0]) == CONVERGENCE_COLUMNS
    assert table[1] == {"level": 1.0, "dofs": 900.0, "w_A": -1.6e-4, "B": 2.5}

    with pytest.raises(SolverError):
        write_convergence_csv(tmp_path / "bad.csv", [ConvergenceRow(0, 4, 300, float("nan"), 1.0)])


def test_path_table(tmp_path):
    path = ContinuationPath()
    for step, lam in enumerate((0.0, 0.5, 0.75)):
        path.append(PathPoint(
            step=step, lam=lam, u=np.zeros(3), monitors=np.array([lam, 0.0, -2.0 * lam]),
            stiffness=1.0, iterations=1, residual=0.0, arc_length=0.1,
        ))
    table = read_table(write_path_csv(tmp_path / "p.csv", path))
    assert list(table[0]) == PATH_COLUMNS
    assert [row["step"] for row in table] == [0.0, 1.0, 2.0]
    assert table[2]["w_monitor"] == pytest.approx(-1.5)


def test_run_verify_and_export(tmp_path):
    config = _config(tmp_path)
    result = run(config, "verify-g1")
    assert result['report'].passed

    result = run(config, "export-geometry")
    exported = read_geometry_file(result['outputs']['geometry'])
    assert len(exported.surface) == 2
    assert len(exported.interfaces) == 1
    assert result['outputs']['geometry'] == tmp_path / "lshape_2p.geo"


def test_run_basis_check(tmp_path):
    result = run(_config(tmp_path), "basis-check")
    (report,) = result['reports']
    assert report.passed
    assert report.dimension == 75


def test_run_solve_writes_results(tmp_path):
    result = run(_config(tmp_path, **{"output.vtk_samples": 3, "output.plots": False}), "solve")
    table = read_table(result['outputs']['table'])
    assert table[0]["dofs"] == 225.0
    assert np.isfinite(table[0]["w_A"])
    assert table[0]["B"] > 0.0
    vtk = result['outputs']['vtk'].read_text()
    assert "POINTS 18 double" in vtk
    assert "von_mises_membrane_MPa" in vtk


def test_geometry_run_needs_mechanics(two_square_surface, tmp_path):
    surface, topology = two_square_surface
    geometry = write_geometry(tmp_path / "squares.geo", surface, topology)
    config = _config(tmp_path, case=None, geometry=str(geometry))
    assert run(config, "verify-g1")['case'].name == "squares"
    with pytest.raises(ParameterError):
        run(config, "solve")
