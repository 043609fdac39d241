"""Marginal concave envelopes of functionals on a two-parameter lower set.

A functional is sampled on a uniform (f, g) grid of a `ParamFamily`. An X-pass
replaces the values along every fiber of fixed g by their least concave
majorant in the coordinate P_X(1); a Y-pass does the same along fibers of
fixed f in P_Y(1). Cells equal to `NEG_INF` carry no constraint.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Callable, Final, Iterator

import numpy as np
import numpy.typing as npt

from keyrate.core import (
    FloatArray,
    JointDist,
    ParamFamily,
    chart_entries,
    grid_information,
    joint_entropy,
    mutual_information,
    param_to_joint,
)
from keyrate.exceptions import ConvergenceWarning, DomainError, GridError
from keyrate.workers import parallel_map

logger = logging.getLogger(__name__)

NEG_INF: Final[float] = -math.inf
INDEP_TOL: Final[float] = 1e-10
NODE_TOL: Final[float] = 1e-12
MIN_GRID_N: Final[int] = 33

Rounds = int | float
StopCondition = Callable[["GridFunctional"], bool]


class Axis(str, Enum):
    """The marginal moved by a pass."""

    X = "x"
    Y = "y"

    def other(self) -> Axis:
        """The opposite axis."""
        return Axis.Y if self is Axis.X else Axis.X


@dataclass
class EnvelopeConfig:
    """Grid and iteration settings of the envelope computation."""

    grid_n: int = 201
    sup_norm_tol: float = 1e-8
    max_passes: int = 500
    grid_tol: float = 1e-3
    threads: int = 1

    def validate(self) -> None:
        """Validate the settings."""
        if self.grid_n < MIN_GRID_N or self.grid_n % 2 == 0:
            raise GridError(f"grid_n must be odd and >= 33, got {self.grid_n}.")
        if self.sup_norm_tol <= 0.0 or self.grid_tol <= 0.0:
            raise GridError("Envelope tolerances must be positive.")
        if self.max_passes < 1:
            raise GridError("max_passes must be at least 1.")
        if self.threads < 1:
            raise GridError("threads must be at least 1.")


@dataclass(frozen=True, eq=False)
class GridFunctional:
    """Extended-real values of a functional on the uniform chart grid.

    Attributes:
        family: The chart the grid lives on.
        values: Values indexed [f index, g index]; NEG_INF where undefined.
        singular: Mask of cells where the chart itself is undefined.
        passes: Number of marginal passes applied so far.
    """

    family: ParamFamily
    values: FloatArray
    singular: npt.NDArray[np.bool_] = field(repr=False)
    passes: int = 0

    @property
    def grid_n(self) -> int:
        """Points per axis."""
        return int(self.values.shape[0])

    @property
    def axis(self) -> FloatArray:
        """Grid coordinates shared by f and g."""
        return np.linspace(0.0, 1.0, self.grid_n)

    def node(self, t: float) -> int:
        """Index of the grid node at coordinate t."""
        index = int(round(t * (self.grid_n - 1)))
        on_grid = abs(index / (self.grid_n - 1) - t) <= NODE_TOL
        if not (0 <= index < self.grid_n and on_grid):
            raise GridError(f"{t} is not a node of a grid with {self.grid_n} points.")
        return index

    def at(self, f: float, g: float) -> float:
        """Value at a grid node."""
        return float(self.values[self.node(f), self.node(g)])

    def base_value(self) -> float:
        """Value at the family's base point."""
        return self.at(*self.family.base)

    def with_values(
        self, values: FloatArray, passes: int | None = None
    ) -> GridFunctional:
        """Copy carrying new values."""
        values = np.where(self.singular, NEG_INF, values)
        if passes is None:
            passes = self.passes
        return replace(self, values=values, passes=passes)

    def rows(self) -> Iterator[tuple[float, float, float]]:
        """Iterate over (f, g, value) in row-major order."""
        axis = self.axis
        for i, f in enumerate(axis):
            for j, g in enumerate(axis):
                yield float(f), float(g), float(self.values[i, j])


def eval_omega0(s: float, joint: JointDist) -> float:
    """The base functional s H(X,Y) - I(X;Y)."""
    if not s > 0.0:
        raise DomainError("s", s, "(0, inf)")
    return s * joint_entropy(joint) - mutual_information(joint)


def eval_sigma0(joint: JointDist, indep_tol: float = INDEP_TOL) -> float:
    """H(X,Y) on the independence locus, NEG_INF elsewhere."""
    if mutual_information(joint) <= indep_tol:
        return joint_entropy(joint)
    return NEG_INF


def fiber_coordinate(family: ParamFamily, f: float, g: float, axis: Axis) -> float:
    """Marginal coordinate of a chart point along the fiber of the given axis."""
    joint = param_to_joint(family, f, g)
    marginal = joint.p_x if Axis(axis) is Axis.X else joint.p_y
    return float(marginal[1])


@dataclass(frozen=True, eq=False)
class _ChartGrid:
    entries: FloatArray
    singular: npt.NDArray[np.bool_]
    abscissa_x: FloatArray
    abscissa_y: FloatArray


@lru_cache(maxsize=32)
def _chart_grid(family: ParamFamily, grid_n: int) -> _ChartGrid:
    axis = np.linspace(0.0, 1.0, grid_n)
    f, g = np.meshgrid(axis, axis, indexing="ij")
    raw, normalizer = chart_entries(family, f, g)
    singular = ~(normalizer > 0)
    entries = raw / np.where(singular, 1.0, normalizer)[..., None, None]
    abscissa_x = entries[..., 1, :].sum(axis=-1)
    abscissa_y = entries[..., :, 1].sum(axis=-1)
    for array in (entries, singular, abscissa_x, abscissa_y):
        array.setflags(write=False)
    return _ChartGrid(entries, singular, abscissa_x, abscissa_y)


def _sample(family: ParamFamily, grid_n: int, values: FloatArray) -> GridFunctional:
    chart = _chart_grid(family, grid_n)
    return GridFunctional(
        family, np.where(chart.singular, NEG_INF, values), chart.singular
    )


def sample_omega0(s: float, family: ParamFamily, grid_n: int) -> GridFunctional:
    """Sample s H - I over the chart grid."""
    if not s > 0.0:
        raise DomainError("s", s, "(0, inf)")
    chart = _chart_grid(family, grid_n)
    h_xy, info = grid_information(chart.entries)
    return _sample(family, grid_n, s * h_xy - info)


def sample_sigma0(
    family: ParamFamily, grid_n: int, indep_tol: float = INDEP_TOL
) -> GridFunctional:
    """Sample the independence-locus joint entropy over the chart grid."""
    chart = _chart_grid(family, grid_n)
    h_xy, info = grid_information(chart.entries)
    return _sample(family, grid_n, np.where(info <= indep_tol, h_xy, NEG_INF))


def sample_function(
    family: ParamFamily, grid_n: int, values: npt.ArrayLike
) -> GridFunctional:
    """Wrap precomputed grid values, masking chart-singular cells."""
    return _sample(family, grid_n, np.asarray(values, dtype=float))


def upper_concave_hull_1d(x: npt.ArrayLike, v: npt.ArrayLike) -> FloatArray:
    """Least concave majorant of the finite points, evaluated at every x.

    Points sharing an abscissa are merged by their maximum. Abscissas outside
    the span of the finite points keep the value NEG_INF.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.full(v.shape, NEG_INF)
    finite = np.isfinite(v)
    if not finite.any():
        return out

    xs, vs = x[finite], v[finite]
    order = np.lexsort((vs, xs))
    xs, vs = xs[order], vs[order]
    last_of_group = np.append(xs[1:] != xs[:-1], True)
    xs, vs = xs[last_of_group], vs[last_of_group]

    hull_x: list[float] = []
    hull_v: list[float] = []
    for px, pv in zip(xs.tolist(), vs.tolist()):
        while len(hull_x) >= 2:  # noqa: PLR2004 [magic-value-comparison]
            ax, av = hull_x[-2], hull_v[-2]
            bx, bv = hull_x[-1], hull_v[-1]
            if (bx - ax) * (pv - av) - (bv - av) * (px - ax) < 0:
                break
            hull_x.pop()
            hull_v.pop()
        hull_x.append(px)
        hull_v.append(pv)

    inside = (x >= hull_x[0]) & (x <= hull_x[-1])
    out[inside] = np.interp(x[inside], hull_x, hull_v)
    return np.where(finite, np.maximum(out, v), out)


def marginal_envelope_pass(
    fn: GridFunctional, axis: Axis, threads: int = 1
) -> GridFunctional:
    """Concavify every fiber of the given axis in its marginal coordinate."""
    chart = _chart_grid(fn.family, fn.grid_n)
    values = fn.values if axis is Axis.X else fn.values.T
    abscissa = chart.abscissa_x if axis is Axis.X else chart.abscissa_y.T
    singular = chart.singular if axis is Axis.X else chart.singular.T

    def concavify(column: int) -> FloatArray:
        live = ~singular[:, column]
        result = np.full(fn.grid_n, NEG_INF)
        result[live] = upper_concave_hull_1d(
            abscissa[:, column][live], values[:, column][live]
        )
        return result

    columns = parallel_map(concavify, range(fn.grid_n), threads)
    out = np.stack(columns, axis=1)
    if axis is Axis.Y:
        out = out.T
    return fn.with_values(out, fn.passes + 1)


def sup_norm_change(old: FloatArray, new: FloatArray) -> float:
    """Sup-norm change over cells finite in both iterates.

    Cells that turn finite count as an infinite change.
    """
    if np.any(~np.isfinite(old) & np.isfinite(new)):
        return math.inf
    both = np.isfinite(old) & np.isfinite(new)
    if not both.any():
        return 0.0
    return float(np.max(np.abs(new[both] - old[both])))


def xy_concave_envelope(
    fn0: GridFunctional,
    cfg: EnvelopeConfig,
    first: Axis = Axis.X,
    until: StopCondition | None = None,
) -> tuple[GridFunctional, int]:
    """Alternate X- and Y-passes until the grid is a fixed point of both.

    Iteration stops once two consecutive passes each move the grid by less
    than ``cfg.sup_norm_tol``, or as soon as *until* holds for the iterate.

    Returns:
        The envelope and the number of passes used.
    """
    fn, axis = fn0, first
    quiet, delta, passes = 0, math.inf, 0
    while passes < cfg.max_passes:
        updated = marginal_envelope_pass(fn, axis, cfg.threads)
        delta = sup_norm_change(fn.values, updated.values)
        fn, axis, passes = updated, axis.other(), passes + 1
        quiet = quiet + 1 if delta < cfg.sup_norm_tol else 0
        if quiet >= 2:  # noqa: PLR2004 [magic-value-comparison]
            logger.debug(f"Envelope converged after {passes} passes.")
            return fn, passes
        if until is not None and until(fn):
            return fn, passes
    warnings.warn(ConvergenceWarning(passes, delta), stacklevel=2)
    return fn, passes


def _iterate(
    fn0: GridFunctional,
    r: Rounds,
    cfg: EnvelopeConfig,
    first: Axis,
    until: StopCondition | None,
) -> GridFunctional:
    if r == math.inf:
        return xy_concave_envelope(fn0, cfg, first, until)[0]
    if r < 0 or r != int(r):
        raise DomainError("r", r, "non-negative integers or inf")
    fn, axis = fn0, first
    for _ in range(int(r)):
        fn = marginal_envelope_pass(fn, axis, cfg.threads)
        axis = axis.other()
        if until is not None and until(fn):
            break
    return fn


def omega_r(
    s: float,
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    first: Axis = Axis.X,
    until: StopCondition | None = None,
) -> GridFunctional:
    """The r-round envelope of s H - I.

    Odd passes move X and even passes move Y, unless *first* is Y. Passes
    only raise values, so *until* may end the iteration early once a
    lower bound is all the caller needs.
    """
    cfg.validate()
    return _iterate(sample_omega0(s, family, cfg.grid_n), r, cfg, first, until)


def sigma_r(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    indep_tol: float = INDEP_TOL,
    first: Axis = Axis.X,
) -> GridFunctional:
    """The r-round envelope of the independence-locus joint entropy."""
    cfg.validate()
    return _iterate(sample_sigma0(family, cfg.grid_n, indep_tol), r, cfg, first, None)
