"""
Bezier Extraction

Element extraction operators mapping Bernstein polynomials to the active
B-splines of each knot span, plus Gauss-Legendre element rules. Assembly uses
these to tabulate basis functions once per element.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.special import comb

from .univariate import UnivariateSplineSpace


def compute_bezier_extraction_1d(knots: np.ndarray, degree: int) -> np.ndarray:
    """
    Local extraction operators C_e with N_e(x) = C_e @ B(x) on every element.

    Args:
        knots: Open knot vector
        degree: Spline degree

    Returns:
        np.ndarray: Array of shape (n_elements, degree+1, degree+1)
    """
    knots = np.asarray(knots, dtype=float)
    n_knots = knots.shape[0]
    a = degree
    b = a + 1

    cs = [np.eye(degree + 1)]
    while (b + 1) < n_knots:
        cc = cs[-1]

        b0 = b
        while (b + 1) < n_knots and knots[b] == knots[b + 1]:
            b += 1
        mult = b - b0 + 1

        if (b + 1) < n_knots:
            cn = np.eye(degree + 1)
            cs.append(cn)

        if mult < degree:
            alphas = np.zeros(degree - mult)
            numer = knots[b] - knots[a]
            for ij in range(degree, mult, -1):
                alphas[ij - mult - 1] = numer / (knots[a + ij] - knots[a])

            r = degree - mult
            for ij in range(r):
                save = r - ij - 1
                s = mult + ij
                for ik in range(degree, s, -1):
                    alpha = alphas[ik - s - 1]
                    cc[:, ik] = alpha * cc[:, ik] + (1.0 - alpha) * cc[:, ik - 1]
                if (b + 1) < n_knots:
                    cn[save:ij + save + 2, save] = cc[degree - ij - 1:degree + 1, degree]

        if (b + 1) < n_knots:
            a = b
            b = b + 1

    return np.asarray(cs)


def bernstein(x: np.ndarray, degree: int, deriv: int = 0) -> np.ndarray:
    """Bernstein polynomials (or a derivative) on [0, 1], shape (len(x), degree+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((x.size, degree + 1))
    if deriv > degree:
        return out
    lower = degree - deriv
    i = np.arange(lower + 1)
    base = comb(lower, i) * x[:, None] ** i * (1.0 - x[:, None]) ** (lower - i)
    # d^m B_i^p = p!/(p-m)! * sum_s (-1)^{m-s} C(m,s) B_{i-s}^{p-m}
    scale = 1.0
    for q in range(deriv):
        scale *= degree - q
    for s in range(deriv + 1):
        sign = (-1.0) ** (deriv - s) * comb(deriv, s)
        out[:, s:s + lower + 1] += sign * base
    return scale * out


@dataclass(frozen=True)
class ElementRule:
    """Gauss points (parametric) and weights of one knot span."""

    element: int
    first: int
    points: np.ndarray
    weights: np.ndarray
    values: np.ndarray  # (3, n_points, p+1) active B-spline derivatives 0..2


@lru_cache(maxsize=64)
def element_rules(space: UnivariateSplineSpace, n_points: int) -> Tuple[ElementRule, ...]:
    """
    Gauss-Legendre rule and basis tables on every element of ``space``.

    Returns:
        Tuple[ElementRule, ...]: One rule per element, ordered by position
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_points)
    ref = 0.5 * (nodes + 1.0)
    ref_weights = 0.5 * weights
    extraction = compute_bezier_extraction_1d(space.knots, space.p)
    h = space.h
    rules: List[ElementRule] = []
    for e in range(space.k):
        tables = np.stack([
            bernstein(ref, space.p, d) @ extraction[e].T / h ** d for d in range(3)
        ])
        first = _first_active(space, e)
        tables.setflags(write=False)
        rules.append(ElementRule(
            element=e,
            first=first,
            points=(e + ref) * h,
            weights=ref_weights * h,
            values=tables,
        ))
    return tuple(rules)


def _first_active(space: UnivariateSplineSpace, element: int) -> int:
    """Index of the first B-spline supported on ``element``."""
    return element * (space.p - space.r)
