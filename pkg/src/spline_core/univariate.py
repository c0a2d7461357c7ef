"""
Univariate Spline Spaces

Open uniform B-spline spaces S_h^{p,r} on [0, 1], basis evaluation with
derivatives, Greville abscissae and collocation matrices.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Tuple

import numpy as np

from errors import DomainError, ParameterError

logger = logging.getLogger(__name__)

KNOT_TOL = 1e-12


@dataclass(frozen=True)
class UnivariateSplineSpace:
    """Spline space of degree p, regularity r on k uniform elements."""

    degree: int
    regularity: int
    elements: int

    def __post_init__(self):
        if self.degree < 1:
            raise ParameterError(f"degree must be >= 1, got {self.degree}")
        if not -1 <= self.regularity <= self.degree - 1:
            raise ParameterError(
                f"regularity must lie in [-1, {self.degree - 1}], got {self.regularity}"
            )
        if self.elements < 1:
            raise ParameterError(f"element count must be >= 1, got {self.elements}")

    @classmethod
    def from_knots(cls, knots: Sequence[float]) -> "UnivariateSplineSpace":
        """
        Recover (p, r, k) from an open uniform knot vector.

        Args:
            knots: Knot vector on [0, 1]

        Returns:
            UnivariateSplineSpace: Space whose knot vector equals ``knots``

        Raises:
            ParameterError: If the vector is not open and uniform
        """
        knots = np.asarray(knots, dtype=float)
        if knots.ndim != 1 or knots.size < 4:
            raise ParameterError("knot vector too short")
        if abs(knots[0]) > KNOT_TOL or abs(knots[-1] - 1.0) > KNOT_TOL:
            raise ParameterError("knot vector must span [0, 1]")
        if np.any(np.diff(knots) < -KNOT_TOL):
            raise ParameterError("knot vector must be nondecreasing")

        start = int(np.sum(np.abs(knots) <= KNOT_TOL))
        stop = int(np.sum(np.abs(knots - 1.0) <= KNOT_TOL))
        if start != stop:
            raise ParameterError("first and last knot multiplicities differ")
        degree = start - 1

        interior = knots[start:knots.size - stop]
        if interior.size == 0:
            space = cls(degree, degree - 1, 1)
        else:
            values, counts = _group_knots(interior)
            if np.any(counts != counts[0]):
                raise ParameterError("interior knot multiplicities must be equal")
            elements = values.size + 1
            expected = np.arange(1, elements) / elements
            if np.max(np.abs(values - expected)) > KNOT_TOL:
                raise ParameterError("interior knots must be uniformly spaced")
            space = cls(degree, degree - int(counts[0]), elements)

        if space.knots.size != knots.size or np.max(np.abs(space.knots - knots)) > KNOT_TOL:
            raise ParameterError("knot vector is not open uniform")
        return space

    # Short names used throughout the formulas
    @property
    def p(self) -> int:
        return self.degree

    @property
    def r(self) -> int:
        return self.regularity

    @property
    def k(self) -> int:
        return self.elements

    @property
    def h(self) -> float:
        return 1.0 / self.elements

    @property
    def dimension(self) -> int:
        """n = p + (k-1)(p-r) + 1"""
        return self.p + (self.k - 1) * (self.p - self.r) + 1

    @property
    def n0(self) -> int:
        """Dimension of the companion space S^{p,r+1}."""
        return self.p + (self.k - 1) * (self.p - self.r - 1) + 1

    @property
    def n1(self) -> int:
        """Dimension of the companion space S^{p-1,r}."""
        return self.p + (self.k - 1) * (self.p - self.r - 1)

    def raise_regularity(self) -> "UnivariateSplineSpace":
        return UnivariateSplineSpace(self.p, self.r + 1, self.k)

    def lower_degree(self) -> "UnivariateSplineSpace":
        return UnivariateSplineSpace(self.p - 1, self.r, self.k)

    @cached_property
    def knots(self) -> np.ndarray:
        interior = np.repeat(np.arange(1, self.k) / self.k, self.p - self.r)
        return np.concatenate([np.zeros(self.p + 1), interior, np.ones(self.p + 1)])

    def find_span(self, xi: float) -> int:
        """Index mu with knots[mu] <= xi < knots[mu + 1]; xi = 1 maps to the last span."""
        n = self.dimension
        span = int(np.searchsorted(self.knots, xi, side="right")) - 1
        return min(max(span, self.p), n - 1)

    def nests_in(self, other: "UnivariateSplineSpace") -> bool:
        """True if every function of this space belongs to ``other``."""
        return (
            other.k % self.k == 0
            and other.p >= self.p
            and (self.k == 1 or other.r <= self.r)
        )

    def __str__(self) -> str:
        return f"S(p={self.p}, r={self.r}, k={self.k})"


def _group_knots(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    distinct = [values[0]]
    counts = [1]
    for value in values[1:]:
        if abs(value - distinct[-1]) <= KNOT_TOL:
            counts[-1] += 1
        else:
            distinct.append(value)
            counts.append(1)
    return np.asarray(distinct), np.asarray(counts)


def _check_parameter(xi: float):
    if not (-KNOT_TOL <= xi <= 1.0 + KNOT_TOL) or not np.isfinite(xi):
        raise DomainError(f"parameter {xi} outside [0, 1]")


def _ders_basis(knots: np.ndarray, p: int, span: int, x: float, nd: int) -> np.ndarray:
    """Nonzero basis functions and derivatives at x (triangular recursion)."""
    ndu = np.empty((p + 1, p + 1))
    left = np.empty(p + 1)
    right = np.empty(p + 1)
    ndu[0, 0] = 1.0
    for j in range(1, p + 1):
        left[j] = x - knots[span + 1 - j]
        right[j] = knots[span + j] - x
        saved = 0.0
        for r in range(j):
            ndu[j, r] = right[r + 1] + left[j - r]
            temp = ndu[r, j - 1] / ndu[j, r]
            ndu[r, j] = saved + right[r + 1] * temp
            saved = left[j - r] * temp
        ndu[j, j] = saved

    ders = np.zeros((nd + 1, p + 1))
    ders[0] = ndu[:, p]
    top = min(nd, p)
    a = np.empty((2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[0, 0] = 1.0
        for k in range(1, top + 1):
            d = 0.0
            rk = r - k
            pk = p - k
            if r >= k:
                a[s2, 0] = a[s1, 0] / ndu[pk + 1, rk]
                d = a[s2, 0] * ndu[rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[s2, j] = (a[s1, j] - a[s1, j - 1]) / ndu[pk + 1, rk + j]
                d += a[s2, j] * ndu[rk + j, pk]
            if r <= pk:
                a[s2, k] = -a[s1, k - 1] / ndu[pk + 1, r]
                d += a[s2, k] * ndu[r, pk]
            ders[k, r] = d
            s1, s2 = s2, s1

    factor = p
    for k in range(1, top + 1):
        ders[k] *= factor
        factor *= p - k
    return ders


def eval_basis(space: UnivariateSplineSpace, xi: float, max_deriv: int = 0) -> Tuple[int, np.ndarray]:
    """
    Evaluate the p+1 active basis functions and their derivatives.

    Args:
        space: Spline space
        xi: Parameter in [0, 1]
        max_deriv: Highest derivative order (0..3)

    Returns:
        Tuple[int, np.ndarray]: first active index and a (max_deriv+1, p+1) table
    """
    if not 0 <= max_deriv <= 3:
        raise ParameterError(f"max_deriv must lie in 0..3, got {max_deriv}")
    _check_parameter(xi)
    xi = min(max(float(xi), 0.0), 1.0)
    span = space.find_span(xi)
    return span - space.p, _ders_basis(space.knots, space.p, span, xi, max_deriv)


def greville_abscissae(space: UnivariateSplineSpace) -> np.ndarray:
    """Knot averages t_{j+1..j+p}; the standard unisolvent interpolation nodes."""
    knots = space.knots
    p = space.p
    g = np.array([knots[j + 1:j + p + 1].mean() for j in range(space.dimension)])
    g[0], g[-1] = 0.0, 1.0
    return g


def collocation_matrix(space: UnivariateSplineSpace, points: Sequence[float], deriv: int = 0) -> np.ndarray:
    """Dense matrix of basis function values (or derivatives) at ``points``."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    matrix = np.zeros((points.size, space.dimension))
    for row, xi in enumerate(points):
        first, table = eval_basis(space, xi, deriv)
        matrix[row, first:first + space.p + 1] = table[deriv]
    return matrix


def collocation_tables(space: UnivariateSplineSpace, points: Sequence[float], max_deriv: int) -> np.ndarray:
    """Stacked collocation matrices for derivative orders 0..max_deriv."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    tables = np.zeros((max_deriv + 1, points.size, space.dimension))
    for row, xi in enumerate(points):
        first, table = eval_basis(space, xi, max_deriv)
        tables[:, row, first:first + space.p + 1] = table
    return tables
