"""
Geometry File Format

Plain-text multi-patch geometry with an optional topology and gluing block:

    C1SHELL-GEOMETRY 1
    PATCHES <count>
    PATCH <i>
    DEGREE <p1> <p2>
    KNOTS1 <m> <t_0> ... <t_m-1>
    KNOTS2 <m> <t_0> ... <t_m-1>
    CONTROL <n1> <n2> <d>
    <x> <y> <z>            (n1 * n2 rows, xi1 index outer)
    END PATCH
    TOPOLOGY <count>
    <patch1> <side1> <patch2> <side2> <reversed>
    END TOPOLOGY
    GLUING <count>
    <edge> <alpha1> | <alpha2> | <beta1> | <beta2>
    END GLUING

Numbers are written with 17 significant digits so that reading a written
file reproduces the coefficients bit for bit.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial

from errors import GeometryParseError, InputError
from gluing_data import EdgeGluingData
from multipatch_topology import MultiPatchSurface, Side, Topology
from spline_core import TensorSplinePatch, TensorSplineSpace, UnivariateSplineSpace

logger = logging.getLogger(__name__)

MAGIC = "C1SHELL-GEOMETRY"
VERSION = 1

InterfaceRecord = Tuple[int, Side, int, Side, bool]


@dataclass
class GeometryFile:
    """Contents of a geometry file."""

    surface: MultiPatchSurface
    interfaces: List[InterfaceRecord] = field(default_factory=list)
    gluing: List[EdgeGluingData] = field(default_factory=list)


def _number(x: float) -> str:
    return f"{x:.17g}"


class _Lines:
    """Line cursor that reports 1-based line numbers."""

    def __init__(self, text: str):
        self._lines = text.splitlines()
        self.index = 0

    @property
    def line(self) -> int:
        return self.index

    def peek(self) -> Optional[str]:
        while self.index < len(self._lines) and not self._lines[self.index].strip():
            self.index += 1
        return self._lines[self.index].strip() if self.index < len(self._lines) else None

    def take(self, expected: str) -> List[str]:
        text = self.peek()
        if text is None:
            raise GeometryParseError(f"unexpected end of file, missing {expected}", self.index + 1)
        self.index += 1
        return text.split()

    def keyword(self, keyword: str, count: Optional[int] = None) -> List[str]:
        tokens = self.take(keyword)
        if tokens[0] != keyword:
            raise GeometryParseError(f"expected {keyword}, found '{tokens[0]}'", self.line)
        if count is not None and len(tokens) != count + 1:
            raise GeometryParseError(f"{keyword} takes {count} value(s), found {len(tokens) - 1}", self.line)
        return tokens[1:]


def _ints(tokens: List[str], line: int) -> List[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise GeometryParseError(f"expected integers, found {' '.join(tokens)}", line) from None


def _floats(tokens: List[str], line: int) -> np.ndarray:
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError:
        raise GeometryParseError(f"expected numbers, found {' '.join(tokens)}", line) from None
    if not np.all(np.isfinite(values)):
        raise GeometryParseError("non-finite number", line)
    return values


def _knots(lines: _Lines, keyword: str, degree: int) -> UnivariateSplineSpace:
    tokens = lines.keyword(keyword)
    if not tokens:
        raise GeometryParseError(f"{keyword} needs a length", lines.line)
    (count,) = _ints(tokens[:1], lines.line)
    values = _floats(tokens[1:], lines.line)
    if values.size != count:
        raise GeometryParseError(f"{keyword} announces {count} knots, found {values.size}", lines.line)
    try:
        space = UnivariateSplineSpace.from_knots(values)
    except InputError as e:
        raise GeometryParseError(str(e), lines.line) from e
    if space.p != degree:
        raise GeometryParseError(f"{keyword} describes degree {space.p}, DEGREE says {degree}", lines.line)
    return space


def _patch(lines: _Lines, index: int) -> TensorSplinePatch:
    (number,) = _ints(lines.keyword("PATCH", 1), lines.line)
    if number != index:
        raise GeometryParseError(f"expected PATCH {index}, found PATCH {number}", lines.line)
    p1, p2 = _ints(lines.keyword("DEGREE", 2), lines.line)
    first = _knots(lines, "KNOTS1", p1)
    second = _knots(lines, "KNOTS2", p2)
    n1, n2, dim = _ints(lines.keyword("CONTROL", 3), lines.line)
    try:
        space = TensorSplineSpace(first, second)
    except InputError as e:
        raise GeometryParseError(str(e), lines.line) from e
    if (n1, n2) != space.shape:
        raise GeometryParseError(f"CONTROL {n1} x {n2} does not match the knot vectors {space.shape}", lines.line)

    rows = []
    for _ in range(n1 * n2):
        row = _floats(lines.take(f"control row of patch {index}"), lines.line)
        if row.size != dim:
            raise GeometryParseError(f"control row has {row.size} values, expected {dim}", lines.line)
        rows.append(row)
    lines.keyword("END", 1)
    return TensorSplinePatch(space, np.array(rows).reshape(n1, n2, dim))


def _interfaces(lines: _Lines) -> List[InterfaceRecord]:
    (count,) = _ints(lines.keyword("TOPOLOGY", 1), lines.line)
    records = []
    for _ in range(count):
        tokens = lines.take("interface record")
        if len(tokens) != 5:
            raise GeometryParseError("interface record needs 5 fields", lines.line)
        try:
            records.append((int(tokens[0]), Side(tokens[1]), int(tokens[2]), Side(tokens[3]), tokens[4] == "1"))
        except ValueError:
            raise GeometryParseError(f"malformed interface record '{' '.join(tokens)}'", lines.line) from None
    lines.keyword("END", 1)
    return records


def _gluing(lines: _Lines) -> List[EdgeGluingData]:
    (count,) = _ints(lines.keyword("GLUING", 1), lines.line)
    data = []
    for _ in range(count):
        tokens = lines.take("gluing record")
        parts = " ".join(tokens[1:]).split("|")
        if len(parts) != 4:
            raise GeometryParseError("gluing record needs four polynomials", lines.line)
        (edge,) = _ints(tokens[:1], lines.line)
        coefficients = [_floats(part.split(), lines.line) for part in parts]
        if any(c.size == 0 for c in coefficients):
            raise GeometryParseError("empty gluing polynomial", lines.line)
        polys = [Polynomial(c) for c in coefficients]
        data.append(EdgeGluingData(*polys, edge=edge))
    lines.keyword("END", 1)
    return data


def parse_geometry_text(text: str) -> GeometryFile:
    """
    Parse the text of a geometry file.

    Raises:
        GeometryParseError: Malformed header or section, dimension mismatch or
            non-finite number (carries the line number)
    """
    lines = _Lines(text)
    header = lines.take("header")
    if len(header) != 2 or header[0] != MAGIC:
        raise GeometryParseError(f"missing '{MAGIC} <version>' header", lines.line)
    if header[1] != str(VERSION):
        raise GeometryParseError(f"unsupported format version {header[1]}", lines.line)

    (count,) = _ints(lines.keyword("PATCHES", 1), lines.line)
    if count < 1:
        raise GeometryParseError("a geometry needs at least one patch", lines.line)
    patches = [_patch(lines, i) for i in range(count)]

    interfaces: List[InterfaceRecord] = []
    gluing: List[EdgeGluingData] = []
    while lines.peek() is not None:
        section = lines.peek().split()[0]
        if section == "TOPOLOGY":
            interfaces = _interfaces(lines)
        elif section == "GLUING":
            gluing = _gluing(lines)
        else:
            raise GeometryParseError(f"unknown section '{section}'", lines.index + 1)

    try:
        surface = MultiPatchSurface(patches)
    except InputError as e:
        raise GeometryParseError(str(e)) from e
    return GeometryFile(surface, interfaces, gluing)


def parse_geometry(path: Union[str, Path]) -> MultiPatchSurface:
    """Read the surface of a geometry file."""
    return read_geometry_file(path).surface


def read_geometry_file(path: Union[str, Path]) -> GeometryFile:
    path = Path(path)
    if not path.exists():
        raise GeometryParseError(f"geometry file not found: {path}")
    contents = parse_geometry_text(path.read_text())
    logger.info(f"Geometry loaded from {path}: {len(contents.surface)} patches")
    return contents


def _polynomial(poly: Polynomial) -> str:
    return " ".join(_number(c) for c in poly.coef)


def geometry_lines(
    surface: MultiPatchSurface,
    topology: Optional[Topology] = None,
    gluing: Optional[List[EdgeGluingData]] = None,
) -> Iterator[str]:
    yield f"{MAGIC} {VERSION}"
    yield f"PATCHES {len(surface)}"
    for i, patch in enumerate(surface.patches):
        yield f"PATCH {i}"
        yield f"DEGREE {patch.space.first.p} {patch.space.second.p}"
        for keyword, space in (("KNOTS1", patch.space.first), ("KNOTS2", patch.space.second)):
            yield f"{keyword} {space.knots.size} " + " ".join(_number(t) for t in space.knots)
        n1, n2, dim = patch.control.shape
        yield f"CONTROL {n1} {n2} {dim}"
        for row in patch.control.reshape(-1, dim):
            yield " ".join(_number(x) for x in row)
        yield "END PATCH"
    if topology is not None:
        yield f"TOPOLOGY {len(topology.interfaces)}"
        for edge in topology.interfaces:
            yield f"{edge.patch1} {edge.side1.value} {edge.patch2} {edge.side2.value} {int(edge.reversed)}"
        yield "END TOPOLOGY"
    if gluing:
        interfaces = [
            data for data in gluing
            if data.edge is not None and (topology is None or topology.edges[data.edge].is_interface)
        ]
        yield f"GLUING {len(interfaces)}"
        for data in interfaces:
            polys = (data.alpha1, data.alpha2, data.beta1, data.beta2)
            yield f"{data.edge} " + " | ".join(_polynomial(p) for p in polys)
        yield "END GLUING"


def write_geometry(
    path: Union[str, Path],
    surface: MultiPatchSurface,
    topology: Optional[Topology] = None,
    gluing: Optional[List[EdgeGluingData]] = None,
) -> Path:
    """Write a surface (and optionally its topology and gluing data)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(geometry_lines(surface, topology, gluing)) + "\n")
    logger.info(f"Geometry written to {path}")
    return path
