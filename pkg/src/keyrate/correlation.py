"""Maximal correlation and the strong data processing closed forms."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Final

import numpy as np

from keyrate.core import FloatArray, JointDist, ParamFamily, chart_entries
from keyrate.exceptions import (
    DegenerateDistributionError,
    DomainError,
    MultiplicityWarning,
)

logger = logging.getLogger(__name__)

SIMPLE_GAP: Final[float] = 1e-9
ADMISSIBLE_TOL: Final[float] = 1e-9


def _support(joint: JointDist) -> tuple[FloatArray, FloatArray]:
    rows = np.flatnonzero(joint.p_x > 0)
    cols = np.flatnonzero(joint.p_y > 0)
    return rows, cols


def correlation_matrix(joint: JointDist) -> FloatArray:
    """The matrix A(x, y) = P(x, y) / sqrt(P_X(x) P_Y(y)).

    Symbols without marginal mass get zero rows or columns, which only adds
    zero singular values.
    """
    px, py = joint.p_x, joint.p_y
    scale = np.sqrt(np.outer(px, py))
    positive = scale > 0
    return np.where(positive, joint.matrix / np.where(positive, scale, 1.0), 0.0)


@dataclass(frozen=True, eq=False)
class SingularData:
    """Spectrum of the correlation matrix.

    Attributes:
        singular_values: All singular values, in descending order.
        u: Left singular vector of the second singular value.
        v: Right singular vector of the second singular value.
    """

    singular_values: FloatArray
    u: FloatArray
    v: FloatArray

    @property
    def sigma2(self) -> float:
        """Second largest singular value."""
        return float(self.singular_values[1])

    @property
    def sigma3(self) -> float:
        """Third largest singular value, 0 on binary alphabets."""
        if self.singular_values.size > 2:  # noqa: PLR2004 [magic-value-comparison]
            return float(self.singular_values[2])
        return 0.0

    @property
    def is_simple(self) -> bool:
        """Whether the second singular value has multiplicity one."""
        top = float(self.singular_values[0])
        return top - self.sigma2 > SIMPLE_GAP and self.sigma2 - self.sigma3 > SIMPLE_GAP


def singular_data(joint: JointDist) -> SingularData:
    """Singular values and second singular vectors of the correlation matrix.

    Vectors are embedded back into the full alphabets and signed so that
    their largest-magnitude entry is positive.

    Raises:
        DegenerateDistributionError: The effective support has a single row
            or a single column.
    """
    rows, cols = _support(joint)
    if rows.size < 2 or cols.size < 2:  # noqa: PLR2004 [magic-value-comparison]
        raise DegenerateDistributionError(
            "The effective support has a single row or column."
        )
    a = correlation_matrix(joint)[np.ix_(rows, cols)]
    left, values, right_t = np.linalg.svd(a)

    u = left[:, 1]
    v = right_t[1]
    if u[np.argmax(np.abs(u))] < 0:
        u, v = -u, -v
    u_full = np.zeros(joint.m)
    v_full = np.zeros(joint.n)
    u_full[rows] = u
    v_full[cols] = v
    return SingularData(values, u_full, v_full)


def maximal_correlation(joint: JointDist) -> float:
    """Hirschfeld-Gebelein-Renyi maximal correlation of X and Y."""
    rows, cols = _support(joint)
    if rows.size < 2 or cols.size < 2:  # noqa: PLR2004 [magic-value-comparison]
        return 0.0
    if rows.size == cols.size == 2:  # noqa: PLR2004 [magic-value-comparison]
        p = joint.matrix[np.ix_(rows, cols)]
        det = p[0, 0] * p[1, 1] - p[0, 1] * p[1, 0]
        px, py = p.sum(axis=1), p.sum(axis=0)
        value = abs(det) / math.sqrt(px[0] * px[1] * py[0] * py[1])
    else:
        value = singular_data(joint).sigma2
    return float(min(max(value, 0.0), 1.0))


def rho_admissible(epsilon: float, s: float, p: float) -> bool:
    """Whether (s, p) is reachable from a lower-set point of a BSS(epsilon)."""
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon", epsilon, "(0, 1)")
    if not -ADMISSIBLE_TOL <= s <= 1.0 / epsilon + ADMISSIBLE_TOL:
        return False
    diagonal_sum = (1.0 - epsilon * s) / (1.0 - epsilon)
    bound = 0.25 * min(diagonal_sum**2, s**2)
    return -ADMISSIBLE_TOL <= p <= bound * (1.0 + ADMISSIBLE_TOL) + ADMISSIBLE_TOL


def rho_m_bss_closed_form(epsilon: float, s: float, p: float) -> float:
    """Squared maximal correlation of a BSS lower-set point from (s, p).

    Args:
        epsilon: Crossover probability of the source.
        s: Sum of the off-diagonal factors of the point.
        p: Product of the off-diagonal factors of the point.

    Raises:
        DomainError: (s, p) violates the admissibility constraints.
    """
    if not rho_admissible(epsilon, s, p):
        raise DomainError("(s, p)", (s, p), f"the admissible set for epsilon={epsilon}")
    gain = (1.0 - 2.0 * epsilon) ** 2 * p
    denominator = gain + epsilon * (1.0 - 2.0 * epsilon) * s + epsilon**2
    if denominator <= 0.0:
        return 0.0
    return gain / denominator


def lower_set_sum_product(joint: JointDist, epsilon: float) -> tuple[float, float]:
    """Read (s, p) = (beta + gamma, beta * gamma) off a BSS lower-set point.

    The point is written as the Hadamard product of the BSC kernel with a
    rank-one matrix [[x, gamma], [beta, y]].
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon", epsilon, "(0, 1)")
    if joint.matrix.shape != (2, 2):
        raise DomainError("joint", joint.matrix.shape, "binary alphabets")
    kernel = np.array([[1.0 - epsilon, epsilon], [epsilon, 1.0 - epsilon]])
    factors = joint.matrix / kernel
    beta, gamma = float(factors[1, 0]), float(factors[0, 1])
    return beta + gamma, beta * gamma


@dataclass(frozen=True)
class LowerSetSupremum:
    """Grid supremum of a functional over the lower set and where it occurs."""

    value: float
    f: float
    g: float


def _grid_rho_squared(family: ParamFamily, grid_n: int) -> FloatArray:
    """Squared maximal correlation on a uniform chart grid, NaN where singular."""
    axis = np.linspace(0.0, 1.0, grid_n)
    f, g = np.meshgrid(axis, axis, indexing="ij")
    raw, normalizer = chart_entries(family, f, g)
    live = normalizer > 0
    p = raw / np.where(live, normalizer, 1.0)[..., None, None]
    px, py = p.sum(axis=-1), p.sum(axis=-2)
    det = p[..., 0, 0] * p[..., 1, 1] - p[..., 0, 1] * p[..., 1, 0]
    marginals = px[..., 0] * px[..., 1] * py[..., 0] * py[..., 1]
    charged = marginals > 0
    rho2 = np.where(charged, det**2 / np.where(charged, marginals, 1.0), 0.0)
    return np.where(live, np.clip(rho2, 0.0, 1.0), np.nan)


def sup_rho_m_over_lower_set(family: ParamFamily, grid_n: int) -> LowerSetSupremum:
    """Supremum of the squared maximal correlation over the chart grid.

    Ties resolve to the first maximizer in row-major (f, g) order.
    """
    if grid_n < 3:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("grid_n", grid_n, "integers >= 3")
    rho2 = _grid_rho_squared(family, grid_n)
    index = int(np.nanargmax(rho2))
    i, j = divmod(index, grid_n)
    axis = np.linspace(0.0, 1.0, grid_n)
    logger.debug(f"sup rho_m^2 = {rho2.flat[index]} at (f, g) = ({axis[i]}, {axis[j]})")
    return LowerSetSupremum(float(rho2.flat[index]), float(axis[i]), float(axis[j]))


def kbib_upper_bound(family: ParamFamily, grid_n: int) -> float:
    """Upper bound sup rho^2/(1 - rho^2) over the lower set on key bits per bit."""
    value = sup_rho_m_over_lower_set(family, grid_n).value
    if value >= 1.0:
        return math.inf
    return value / (1.0 - value)


@dataclass(frozen=True)
class StationarityResiduals:
    """Sup-norm residuals of the stationarity conditions of a maximizer.

    Attributes:
        sigma2: Second singular value of the correlation matrix.
        simple: Whether sigma2 has multiplicity one.
        conditional_x: ||u^2 - Q_{X|Y} v^2||.
        conditional_y: ||v^2 - Q_{Y|X} u^2||.
        marginal_x: ||u^2 - Q_X||.
        marginal_y: ||v^2 - Q_Y||.
    """

    sigma2: float
    simple: bool
    conditional_x: float
    conditional_y: float
    marginal_x: float
    marginal_y: float

    @property
    def worst(self) -> float:
        """The largest of the four residuals."""
        return max(
            self.conditional_x, self.conditional_y, self.marginal_x, self.marginal_y
        )


def stationarity_residuals(joint: JointDist) -> StationarityResiduals:
    """Check whether a distribution satisfies the maximizer conditions.

    A warning is emitted when the second singular value is not simple; the
    residuals are then computed for the basis vector returned by the SVD.
    """
    data = singular_data(joint)
    if not data.is_simple:
        warnings.warn(
            MultiplicityWarning(
                f"Second singular value {data.sigma2:.3e} is not simple."
            ),
            stacklevel=2,
        )
    px, py = joint.p_x, joint.p_y
    x_given_y = np.where(py > 0, joint.matrix / np.where(py > 0, py, 1.0), 0.0)
    y_given_x = np.where(
        px[:, None] > 0, joint.matrix / np.where(px > 0, px, 1.0)[:, None], 0.0
    ).T
    u2, v2 = data.u**2, data.v**2
    return StationarityResiduals(
        sigma2=data.sigma2,
        simple=data.is_simple,
        conditional_x=float(np.max(np.abs(u2 - x_given_y @ v2))),
        conditional_y=float(np.max(np.abs(v2 - y_given_x @ u2))),
        marginal_x=float(np.max(np.abs(u2 - px))),
        marginal_y=float(np.max(np.abs(v2 - py))),
    )


