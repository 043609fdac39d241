"""Grid verification of the binary-source domination inequality.

For a BSS(epsilon) and a symmetric auxiliary with parameter alpha, the
XY-linear functional

    chi(f, g) = s [h(eps) + h(alpha)] - [h(alpha*eps) - h(eps)]
                + c (f - 1/2)(g - 1/2) / Z(f, g)

is conjectured to dominate s H - I over the whole lower set, touching it at
(alpha, 1/2), (1 - alpha, 1/2), (1/2, alpha) and (1/2, 1 - alpha). The slope s
and the constant c depend only on (alpha, epsilon).
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Final

import numpy as np
import numpy.typing as npt

from keyrate.core import (
    FloatArray,
    ParamFamily,
    binary_entropy_array,
    chart_entries,
    compensated_sum,
    neg_xlogx,
)
from keyrate.envelope import GridFunctional, sample_function
from keyrate.exceptions import DomainError, FormulaTranscriptionError
from keyrate.workers import parallel_map

logger = logging.getLogger(__name__)

FORM_RTOL: Final[float] = 1e-9
FORM_ATOL: Final[float] = 1e-12
AUDIT_STEP: Final[float] = 1e-5
AUDIT_GAP_TOL: Final[float] = 1e-10
FULL_SCALE_STEP: Final[float] = 0.001
DESK_SCALE_STEP: Final[float] = 0.01

Range = tuple[float, float]
ProgressCallback = Callable[[int], None]


def _check_open_unit(name: str, value: npt.ArrayLike) -> None:
    array = np.asarray(value, dtype=float)
    if np.any(~((array > 0.0) & (array < 1.0))):
        raise DomainError(name, value, "(0, 1)")


def _log_ratio_slope(alpha: FloatArray) -> FloatArray:
    """ln(alpha / abar) / (abar - alpha), equal to -2 at alpha = 1/2."""
    span = 1.0 - 2.0 * alpha
    centre = span == 0.0
    safe = np.where(centre, 1.0, span)
    value = np.log1p((2.0 * alpha - 1.0) / (1.0 - alpha)) / safe
    return np.where(centre, -2.0, value)


def _mixed_log_ratio_slope(alpha: FloatArray, epsilon: FloatArray) -> FloatArray:
    """ln((alpha*eps) / (abar*eps)) / (abar - alpha), -2(1 - 2 eps) at 1/2."""
    span = 1.0 - 2.0 * alpha
    centre = span == 0.0
    safe = np.where(centre, 1.0, span)
    abar_conv = (1.0 - alpha) * (1.0 - epsilon) + alpha * epsilon
    value = np.log1p((2.0 * alpha - 1.0) * (1.0 - 2.0 * epsilon) / abar_conv) / safe
    return np.where(centre, -2.0 * (1.0 - 2.0 * epsilon), value)


def _slope(alpha: FloatArray, epsilon: FloatArray) -> FloatArray:
    return (
        (1.0 - 2.0 * epsilon)
        * _mixed_log_ratio_slope(alpha, epsilon)
        / _log_ratio_slope(alpha)
    )


def _constant_forms(
    alpha: FloatArray, epsilon: FloatArray
) -> tuple[FloatArray, FloatArray]:
    """Both closed forms of c; the first uses k = s."""
    e, eb = epsilon, 1.0 - epsilon
    l_a = _log_ratio_slope(alpha)
    l_ae = _mixed_log_ratio_slope(alpha, epsilon)
    k = (1.0 - 2.0 * e) * l_ae / l_a
    log_odds = np.log(eb / e)
    conv = alpha * eb + (1.0 - alpha) * e
    first = (
        4.0 * k * alpha * (1.0 - alpha) * (1.0 - 2.0 * e) * l_a
        - 4.0 * (k + 1.0) * e * eb * log_odds
        - 4.0 * conv * (1.0 - conv) * l_ae
    )
    second = (
        -4.0 * e * eb * l_ae
        - 4.0 * e * eb * (1.0 - 2.0 * e) * log_odds * l_ae / l_a
        - 4.0 * e * eb * log_odds
    )
    return first, second


def _checked_constant(alpha: FloatArray, epsilon: FloatArray) -> FloatArray:
    first, second = _constant_forms(alpha, epsilon)
    agree = np.isclose(first, second, rtol=FORM_RTOL, atol=FORM_ATOL)
    if not np.all(agree):
        bad = int(np.argmin(agree.ravel()))
        raise FormulaTranscriptionError(
            "c", float(first.ravel()[bad]), float(second.ravel()[bad])
        )
    return second


def conj2_s(alpha: float, epsilon: float) -> float:
    """The slope s at which chi is matched to s H - I."""
    _check_open_unit("alpha", alpha)
    _check_open_unit("epsilon", epsilon)
    return float(_slope(np.asarray(alpha, float), np.asarray(epsilon, float)))


def conj2_c(alpha: float, epsilon: float) -> float:
    """The cross coefficient c, cross-checked between its two closed forms.

    Raises:
        FormulaTranscriptionError: The two forms disagree beyond 1e-9 relative.
    """
    _check_open_unit("alpha", alpha)
    _check_open_unit("epsilon", epsilon)
    return float(
        _checked_constant(np.asarray(alpha, float), np.asarray(epsilon, float))
    )


@dataclass(frozen=True)
class _SlabConstants:
    s: FloatArray
    c: FloatArray
    affine: FloatArray


def _slab_constants(alpha: FloatArray, epsilon: float) -> _SlabConstants:
    eps = np.full_like(alpha, epsilon)
    s = _slope(alpha, eps)
    c = _checked_constant(alpha, eps)
    h_e = binary_entropy_array(eps)
    conv = alpha * (1.0 - epsilon) + (1.0 - alpha) * epsilon
    h_conv = binary_entropy_array(conv)
    affine = s * (h_e + binary_entropy_array(alpha)) - (h_conv - h_e)
    return _SlabConstants(s, c, affine)


def _chart(
    f: FloatArray, g: FloatArray, epsilon: float
) -> tuple[FloatArray, FloatArray]:
    """Normalized chart matrices and the symmetric normalizer Z."""
    family = ParamFamily.bsc_kernel(epsilon)
    raw, _ = chart_entries(family, f, g)
    fb, gb = 1.0 - f, 1.0 - g
    z = (1.0 - epsilon) * (fb * gb + f * g) + epsilon * (fb * g + f * gb)
    return raw / z[..., None, None], z


def _lhs(entries: FloatArray, s: FloatArray) -> FloatArray:
    """s H(X,Y) - I(X;Y) written as (s + 1) H(X,Y) - H(X) - H(Y)."""
    joint_terms = neg_xlogx(entries).reshape(entries.shape[:-2] + (4,))
    px, py = entries.sum(axis=-1), entries.sum(axis=-2)
    terms = np.concatenate(
        [(s[..., None] + 1.0) * joint_terms, -neg_xlogx(px), -neg_xlogx(py)], axis=-1
    )
    return compensated_sum(terms, axis=-1)


def _gap_slab(
    f: FloatArray, g: FloatArray, alpha: FloatArray, epsilon: float
) -> tuple[FloatArray, float]:
    """Gap on the (alpha, f, g) cube of one epsilon, and its roundoff scale."""
    consts = _slab_constants(alpha, epsilon)
    ff, gg = np.meshgrid(f, g, indexing="ij")
    entries, z = _chart(ff, gg, epsilon)
    cross = (ff - 0.5) * (gg - 0.5) / z
    s = consts.s[:, None, None] * np.ones_like(ff)
    lhs = _lhs(np.broadcast_to(entries, s.shape + (2, 2)), s)
    rhs = consts.affine[:, None, None] + consts.c[:, None, None] * cross
    scale = float(np.max(np.abs(rhs)) + np.max(np.abs(lhs)) + 1.0)
    return rhs - lhs, scale


def conj2_gap(f: float, g: float, alpha: float, epsilon: float) -> float:
    """chi(f, g) minus s H - I at the chart point (f, g) of BSS(epsilon)."""
    for name, value in (("f", f), ("g", g), ("alpha", alpha), ("epsilon", epsilon)):
        _check_open_unit(name, value)
    gap, _ = _gap_slab(
        np.array([f], dtype=float),
        np.array([g], dtype=float),
        np.array([alpha], dtype=float),
        epsilon,
    )
    return float(gap[0, 0, 0])


def chi_values(
    alpha: float, epsilon: float, f: FloatArray, g: FloatArray
) -> FloatArray:
    """The dominating functional chi on a grid of (f, g)."""
    consts = _slab_constants(np.array([alpha], dtype=float), epsilon)
    ff, gg = np.meshgrid(f, g, indexing="ij")
    _, z = _chart(ff, gg, epsilon)
    return consts.affine[0] + consts.c[0] * (ff - 0.5) * (gg - 0.5) / z


def chi_functional(alpha: float, epsilon: float, grid_n: int) -> GridFunctional:
    """chi sampled on the closed chart grid of BSS(epsilon)."""
    _check_open_unit("alpha", alpha)
    _check_open_unit("epsilon", epsilon)
    axis = np.linspace(0.0, 1.0, grid_n)
    family = ParamFamily.bsc_kernel(epsilon)
    return sample_function(family, grid_n, chi_values(alpha, epsilon, axis, axis))


def _check_step(step: float) -> None:
    if not 0.0 < step <= 0.1:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("step", step, "(0, 0.1]")


def colon(start: float, step: float, stop: float) -> FloatArray:
    """The arithmetic progression start, start + step, ... up to stop."""
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(max(count, 0))


@dataclass(frozen=True)
class SweepRanges:
    """(start, stop) of each sweep axis; all axes share the sweep step."""

    f: Range
    g: Range
    epsilon: Range
    alpha: Range

    @classmethod
    def offset(cls, step: float) -> SweepRanges:
        """Offset grids covering f, epsilon, alpha in (0, 1/2) and g in (0, 1)."""
        half = (step / 3.0, 0.5 - step / 3.0)
        return cls(f=half, g=(step / 3.0, 1.0 - step / 3.0), epsilon=half, alpha=half)

    def axes(
        self, step: float
    ) -> tuple[FloatArray, FloatArray, FloatArray, FloatArray]:
        """The f, g, epsilon and alpha grids at *step*."""
        _check_step(step)
        bounds = (self.f, self.g, self.epsilon, self.alpha)
        f, g, epsilons, alphas = (colon(lo, step, hi) for lo, hi in bounds)
        named = (("f", f), ("g", g), ("epsilon", epsilons), ("alpha", alphas))
        for name, axis in named:
            if axis.size == 0:
                raise DomainError(name, getattr(self, name), "non-empty ranges")
            _check_open_unit(name, axis)
        return f, g, epsilons, alphas


@dataclass(frozen=True)
class ConjectureReport:
    """Statistics of a sweep of the gap.

    Attributes:
        step: Sweep step.
        min_gap: Smallest gap seen, in nats.
        argmin: (f, g, epsilon, alpha) of the smallest gap.
        negative_count: Number of cells with a negative gap.
        cells_scanned: Number of cells evaluated.
        wall_time: Seconds spent.
        roundoff_budget: Size of double-precision roundoff at the sweep's scale.
        beyond_budget: Number of cells below minus the roundoff budget.
    """

    step: float
    min_gap: float
    argmin: tuple[float, float, float, float]
    negative_count: int
    cells_scanned: int
    wall_time: float
    roundoff_budget: float
    beyond_budget: int


@dataclass(frozen=True)
class _SlabResult:
    min_gap: float
    argmin: tuple[float, float, float, float]
    negative: int
    beyond: int
    scale: float


def sweep(
    step: float = DESK_SCALE_STEP,
    ranges: SweepRanges | None = None,
    threads: int = 1,
    progress: ProgressCallback | None = None,
) -> ConjectureReport:
    """Evaluate the gap on a four-dimensional grid.

    Each epsilon value is one slab, evaluated at once over (alpha, f, g).
    """
    f, g, epsilons, alphas = (ranges or SweepRanges.offset(step)).axes(step)
    budget_unit = 64.0 * float(np.finfo(float).eps)
    logger.info(
        f"Sweeping {f.size * g.size * epsilons.size * alphas.size} cells at step {step}"
    )

    def run(epsilon: float) -> _SlabResult:
        gap, scale = _gap_slab(f, g, alphas, epsilon)
        index = int(np.argmin(gap))
        a, i, j = np.unravel_index(index, gap.shape)
        result = _SlabResult(
            min_gap=float(gap.flat[index]),
            argmin=(float(f[i]), float(g[j]), float(epsilon), float(alphas[a])),
            negative=int(np.count_nonzero(gap < 0.0)),
            beyond=int(np.count_nonzero(gap < -budget_unit * scale)),
            scale=scale,
        )
        if progress is not None:
            progress(1)
        return result

    started = time.perf_counter()
    slabs = parallel_map(run, epsilons.tolist(), threads)
    wall_time = time.perf_counter() - started

    best = min(slabs, key=lambda slab: slab.min_gap)
    report = ConjectureReport(
        step=step,
        min_gap=best.min_gap,
        argmin=best.argmin,
        negative_count=sum(slab.negative for slab in slabs),
        cells_scanned=f.size * g.size * epsilons.size * alphas.size,
        wall_time=wall_time,
        roundoff_budget=budget_unit * max(slab.scale for slab in slabs),
        beyond_budget=sum(slab.beyond for slab in slabs),
    )
    logger.info(f"Minimum gap {report.min_gap:.3e} at {report.argmin}")
    return report


@dataclass(frozen=True)
class AuditResult:
    """Gap and gradient at the touching points of chi.

    Attributes:
        points: The distinct touching points (f, g).
        max_abs_gap: Largest |gap| over the points.
        max_abs_gradient: Largest central-difference partial derivative.
        passed: Whether both stay within their tolerances.
    """

    points: tuple[tuple[float, float], ...]
    max_abs_gap: float
    max_abs_gradient: float
    passed: bool


def equality_points(alpha: float) -> tuple[tuple[float, float], ...]:
    """The four touching points, merged when they coincide."""
    abar = 1.0 - alpha
    points = ((alpha, 0.5), (abar, 0.5), (0.5, alpha), (0.5, abar))
    return tuple(dict.fromkeys(points))


def equality_point_audit(
    alpha: float,
    epsilon: float,
    step: float = AUDIT_STEP,
    grad_tol: float = 1e-5,
) -> AuditResult:
    """Check that chi touches s H - I tangentially at its four touching points."""
    _check_open_unit("alpha", alpha)
    _check_open_unit("epsilon", epsilon)
    points = equality_points(alpha)
    gaps, gradients = [], []
    for f, g in points:
        gaps.append(abs(conj2_gap(f, g, alpha, epsilon)))
        d_f = conj2_gap(f + step, g, alpha, epsilon) - conj2_gap(
            f - step, g, alpha, epsilon
        )
        d_g = conj2_gap(f, g + step, alpha, epsilon) - conj2_gap(
            f, g - step, alpha, epsilon
        )
        gradients.extend([abs(d_f) / (2.0 * step), abs(d_g) / (2.0 * step)])
    max_gap, max_gradient = max(gaps), max(gradients)
    return AuditResult(
        points=points,
        max_abs_gap=max_gap,
        max_abs_gradient=max_gradient,
        passed=max_gap <= AUDIT_GAP_TOL and max_gradient <= grad_tol,
    )


def _e85_slack(alpha: FloatArray, f: FloatArray, g: FloatArray) -> FloatArray:
    weight = -2.0 / _log_ratio_slope(alpha)
    entropies = (
        math.log(2.0)
        + binary_entropy_array(alpha)
        - binary_entropy_array(f)
        - binary_entropy_array(g)
    )
    return (
        weight * entropies
        - 2.0 * alpha * (1.0 - alpha)
        + 8.0 * f * (1.0 - f) * g * (1.0 - g)
    )


def e85_verify(alpha: float, f: float, g: float) -> float:
    """Slack of the reduced inequality governing the epsilon -> 1/2 regime.

    Zero at f = alpha, g = 1/2; nonnegative wherever the inequality holds.
    """
    if not (0.0 < alpha <= 0.5 and 0.0 < f <= 0.5):  # noqa: PLR2004
        raise DomainError("(alpha, f)", (alpha, f), "(0, 1/2]")
    _check_open_unit("g", g)
    return float(
        _e85_slack(
            np.asarray(alpha, dtype=float),
            np.asarray(f, dtype=float),
            np.asarray(g, dtype=float),
        )
    )


@dataclass(frozen=True)
class E85Report:
    """Statistics of a sweep of the reduced inequality.

    Attributes:
        step: Sweep step.
        min_slack: Smallest slack seen.
        argmin: (alpha, f, g) of the smallest slack.
        negative_count: Number of cells with negative slack.
        cells_scanned: Number of cells evaluated.
        equality_line_max: Largest |slack| along f = alpha, g = 1/2.
    """

    step: float
    min_slack: float
    argmin: tuple[float, float, float]
    negative_count: int
    cells_scanned: int
    equality_line_max: float


def e85_sweep(
    step: float = DESK_SCALE_STEP,
    alpha_range: Range | None = None,
    f_range: Range | None = None,
    g_range: Range | None = None,
) -> E85Report:
    """Evaluate the reduced inequality on an (alpha, f, g) grid."""
    _check_step(step)
    half = (step / 3.0, 0.5 - step / 3.0)
    alphas = colon(*_with_step(alpha_range or half, step))
    f = colon(*_with_step(f_range or half, step))
    g = colon(*_with_step(g_range or (step / 3.0, 1.0 - step / 3.0), step))
    aa, ff, gg = np.meshgrid(alphas, f, g, indexing="ij")
    slack = _e85_slack(aa, ff, gg)
    index = int(np.argmin(slack))
    a, i, j = np.unravel_index(index, slack.shape)
    line = _e85_slack(alphas, alphas, np.full_like(alphas, 0.5))
    return E85Report(
        step=step,
        min_slack=float(slack.flat[index]),
        argmin=(float(alphas[a]), float(f[i]), float(g[j])),
        negative_count=int(np.count_nonzero(slack < 0.0)),
        cells_scanned=int(slack.size),
        equality_line_max=float(np.max(np.abs(line))),
    )


def _with_step(bounds: Range, step: float) -> tuple[float, float, float]:
    return bounds[0], step, bounds[1]


class SurfaceField(str, Enum):
    """Fields that can be drawn over the open unit square."""

    OMEGA0 = "omega0"
    CHI = "chi"
    GAP = "gap"


@dataclass(frozen=True, eq=False)
class Surface:
    """A field sampled on the open grid (f, g) in (0, 1)^2."""

    field: SurfaceField
    alpha: float
    epsilon: float
    axis: FloatArray
    values: FloatArray


def surface_emit(
    field: SurfaceField, alpha: float, epsilon: float, grid_n: int
) -> Surface:
    """Sample s H - I, chi or their difference for plotting."""
    if grid_n < 33:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("grid_n", grid_n, "integers >= 33")
    _check_open_unit("alpha", alpha)
    _check_open_unit("epsilon", epsilon)
    field = SurfaceField(field)
    axis = np.linspace(0.0, 1.0, grid_n + 2)[1:-1]
    alphas = np.array([alpha], dtype=float)
    if field is SurfaceField.GAP:
        values = _gap_slab(axis, axis, alphas, epsilon)[0][0]
    elif field is SurfaceField.CHI:
        values = chi_values(alpha, epsilon, axis, axis)
    else:
        ff, gg = np.meshgrid(axis, axis, indexing="ij")
        entries, _ = _chart(ff, gg, epsilon)
        s = np.full(ff.shape, _slope(alphas, np.array([epsilon]))[0])
        values = _lhs(entries, s)
    return Surface(field, alpha, epsilon, axis, values)
