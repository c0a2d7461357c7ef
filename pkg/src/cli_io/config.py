"""
Run Configuration

YAML run configuration validated into pydantic models, with a built-in
default when no file is given.
"""

import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from errors import ParameterError
from kl_shell import BoundaryConditionSet, LoadCase, ShellMaterial
from solvers import ArcLengthSettings, NewtonSettings

logger = logging.getLogger(__name__)


class AnalysisType(str, Enum):
    """How the equilibrium is computed."""
    LINEAR = "linear"        # K(0) u = F
    NEWTON = "newton"        # full load, Newton from u = 0
    ARCLENGTH = "arclength"  # continuation in the load factor


class OutputSettings(BaseModel):
    """Result files written by a run."""

    directory: str = Field(default="results", description="Output directory")
    vtk: bool = Field(default=True, description="Write the von Mises field as legacy VTK")
    vtk_samples: int = Field(default=17, ge=2, description="Visualization samples per patch direction")
    plots: bool = Field(default=True, description="Write PNG plots of convergence and load paths")


class RunConfig(BaseModel):
    """Everything a CLI run needs."""

    case: Optional[str] = Field(default="hyperboloid_6p_1", description="Benchmark case name")
    geometry: Optional[str] = Field(default=None, description="Geometry file used instead of a case")
    degree: int = Field(default=4, ge=3, description="Spline degree p")
    regularity: int = Field(default=2, ge=1, description="Spline regularity r")
    levels: List[int] = Field(default_factory=lambda: [4, 8], description="Elements per patch direction, one per level")
    analysis: AnalysisType = Field(default=AnalysisType.LINEAR, description="Analysis type")
    load_scale: float = Field(default=1.0, description="Multiplies the case load")
    perturbation_ratio: float = Field(default=1e-3, ge=0.0, description="Out-of-plane to in-plane tip load (L-shapes)")
    penalty: float = Field(default=1e4, gt=0.0, description="Boundary penalty scale")
    workers: int = Field(default=1, ge=1, description="Assembly threads")
    material: Optional[ShellMaterial] = Field(default=None, description="Overrides the case material")
    loads: Optional[LoadCase] = Field(default=None, description="Overrides the case loads")
    boundary: Optional[BoundaryConditionSet] = Field(default=None, description="Overrides the case boundary conditions")
    newton: NewtonSettings = Field(default_factory=NewtonSettings)
    arc_length: ArcLengthSettings = Field(default_factory=ArcLengthSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v):
        if not v:
            raise ValueError("at least one refinement level is required")
        if any(k < 1 for k in v):
            raise ValueError(f"element counts must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def check_source(self):
        if self.regularity > self.degree - 2:
            raise ValueError(f"regularity {self.regularity} exceeds degree - 2 = {self.degree - 2}")
        if self.case is None and self.geometry is None:
            raise ValueError("either a case or a geometry file is required")
        return self

    @property
    def output_dir(self) -> Path:
        return Path(self.output.directory)


def create_default_config() -> Dict[str, Any]:
    """
    Default configuration for development and testing.

    Returns:
        Dict[str, Any]: Default configuration
    """
    return {
        "case": "hyperboloid_6p_1",
        "degree": 4,
        "regularity": 2,
        "levels": [4, 8],
        "analysis": "linear",
        "penalty": 1e4,
        "workers": 1,
        "newton": {"tolerance": 1e-8, "max_iterations": 25},
        "arc_length": {"max_steps": 50, "psi": 0.0},
        "output": {"directory": "results", "vtk": True, "vtk_samples": 17, "plots": True},
    }


def load_config(config_path: Optional[Union[str, Path]]) -> Dict[str, Any]:
    """
    Load a configuration dictionary from YAML.

    A missing file falls back to the default configuration; a file that
    cannot be read is an input error.
    """
    if config_path is None:
        return create_default_config()
    config_file = Path(config_path)
    if not config_file.exists():
        logger.warning(f"Configuration file not found: {config_path}, using defaults")
        return create_default_config()

    try:
        with open(config_file, 'r') as f:
            config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ParameterError(f"cannot parse {config_path}: {e}") from e
    if not isinstance(config, dict):
        raise ParameterError(f"{config_path} must contain a mapping at the top level")

    logger.info(f"Configuration loaded from {config_path}")
    return config


def build_run_config(config: Dict[str, Any], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """
    Validate a configuration dictionary, applying non-None overrides.

    Overrides use dotted keys for nested settings (``"newton.tolerance"``).

    Raises:
        ParameterError: The merged configuration does not validate
    """
    merged = {key: (dict(value) if isinstance(value, dict) else value) for key, value in config.items()}
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        target = merged
        *parents, leaf = key.split(".")
        for parent in parents:
            target = target.setdefault(parent, {})
        target[leaf] = value
    try:
        return RunConfig(**merged)
    except ValidationError as e:
        raise ParameterError(f"invalid run configuration: {e}") from e
