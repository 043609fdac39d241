"""Key-rate regions, strong data processing thresholds, KBIB and MIMK.

Every quantity here is read off the envelope of a base functional at the
source distribution Q, the base point of a `ParamFamily`. Information
measures of Q itself are always computed exactly from Q, never from the grid.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Final, Sequence

import numpy as np
import numpy.typing as npt

from keyrate.core import (
    FloatArray,
    JointDist,
    ParamFamily,
    binary_convolution,
    binary_entropy,
    conditional_entropies,
    grid_information,
    joint_entropy,
    mutual_information,
)
from keyrate.envelope import (
    INDEP_TOL,
    EnvelopeConfig,
    GridFunctional,
    Rounds,
    StopCondition,
    omega_r,
    sigma_r,
    upper_concave_hull_1d,
)
from keyrate.exceptions import (
    DomainError,
    ExtrapolationWarning,
    InconsistencyError,
    ResolutionWarning,
)
from keyrate.workers import parallel_map

logger = logging.getLogger(__name__)

DEFAULT_BISECT_TOL: Final[float] = 1e-3
DEFAULT_S_SEQ: Final[tuple[float, ...]] = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)
RESOLUTION_TOL: Final[float] = 1e-3
BOUNDARY_POINTS: Final[int] = 101
REFINE_ROUNDS: Final[int] = 8


def zero_threshold(cfg: EnvelopeConfig) -> float:
    """Values of phi at or below this count as zero."""
    return 3.0 * cfg.sup_norm_tol


def _rises_above(offset: float, threshold: float) -> StopCondition:
    def check(fn: GridFunctional) -> bool:
        return fn.base_value() + offset > threshold

    return check


def support_value(
    family: ParamFamily,
    r: Rounds,
    s: float,
    cfg: EnvelopeConfig,
    stop_above: float | None = None,
) -> float:
    """phi_r(s) = sup {R - s S} over the r-round region, read at Q.

    Args:
        family: Chart around the source.
        r: Number of rounds, `math.inf` for unlimited interaction.
        s: Slope of the supporting line.
        cfg: Envelope settings.
        stop_above: Stop iterating once phi exceeds this value; the result
            is then only a lower bound.
    """
    q = family.base_joint()
    offset = mutual_information(q) - s * joint_entropy(q)
    until = None if stop_above is None else _rises_above(offset, stop_above)
    omega = omega_r(s, family, r, cfg, until=until)
    return omega.base_value() + offset


def default_slope_grid(s_star: float | None = None) -> FloatArray:
    """Geometric slopes in [1e-3, 1], densified near a known threshold."""
    grid = np.geomspace(1e-3, 1.0, 60)
    if s_star is not None:
        dense = np.linspace(max(1e-3, s_star - 0.15), min(1.0, s_star + 0.05), 30)
        grid = np.union1d(grid, dense)
    return grid


@dataclass(frozen=True)
class RateRegionBoundary:
    """Boundary of the region of (total communication, key) rate pairs.

    Attributes:
        r_rounds: Number of rounds.
        mutual_information: I(X;Y) of the source, the largest key rate.
        supports: (s, phi_r(s)) supporting line data, by increasing s.
        points: (S, R, s) samples of the boundary with the active slope.
    """

    r_rounds: Rounds
    mutual_information: float
    supports: tuple[tuple[float, float], ...]
    points: tuple[tuple[float, float, float], ...]

    def r_at(self, total: float) -> float:
        """Largest key rate R*(S) at total rate S."""
        if total < 0.0:
            raise DomainError("S", total, "[0, inf)")
        lines = min(phi + s * total for s, phi in self.supports)
        return max(0.0, min(self.mutual_information, lines))

    @property
    def saturation(self) -> float:
        """Smallest total rate at which the key rate reaches I(X;Y).

        Every supporting line has to reach I(X;Y), so this is the largest
        (I - phi(s)) / s over the slopes.
        """
        return max(
            max(self.mutual_information - phi, 0.0) / s for s, phi in self.supports
        )


def slope_gaps(slopes: FloatArray, phis: FloatArray) -> FloatArray:
    """Largest possible error of a convex phi between consecutive slopes.

    phi lies below each chord and above the extensions of the neighbouring
    chords. The gap of an interval is the widest vertical distance between
    the two bounds on it.

    Args:
        slopes: Increasing slopes.
        phis: Values of phi at the slopes.

    Returns:
        One gap per interval, zero when no neighbouring chord exists.
    """
    slopes = np.asarray(slopes, dtype=float)
    phis = np.asarray(phis, dtype=float)
    chords = np.diff(phis) / np.diff(slopes)
    gaps = np.zeros(chords.size)
    for i in range(chords.size):
        lo, hi = slopes[i], slopes[i + 1]
        has_left, has_right = i > 0, i + 1 < chords.size
        extensions: list[tuple[float, float, float]] = []
        if has_left:
            extensions.append((lo, phis[i], chords[i - 1]))
        if has_right:
            extensions.append((hi, phis[i + 1], chords[i + 1]))
        if not extensions:
            continue
        at = [lo, hi]
        if has_left and has_right and chords[i + 1] > chords[i - 1]:
            crossing = (
                phis[i + 1] - chords[i + 1] * hi - phis[i] + chords[i - 1] * lo
            ) / (chords[i - 1] - chords[i + 1])
            at.append(min(max(crossing, lo), hi))
        t = np.asarray(at)
        chord = phis[i] + chords[i] * (t - lo)
        below = np.max([p + m * (t - a) for a, p, m in extensions], axis=0)
        gaps[i] = np.max(chord - below)
    return np.maximum(gaps, 0.0)


def _check_resolution(gaps: FloatArray) -> None:
    worst = float(gaps.max(initial=0.0))
    if worst > RESOLUTION_TOL:
        warnings.warn(
            ResolutionWarning(
                f"Adjacent supporting lines disagree by {worst:.3e}; "
                "refine the slope grid."
            ),
            stacklevel=3,
        )


def rate_region_boundary(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    s_grid: Sequence[float] | None = None,
) -> RateRegionBoundary:
    """Boundary R*(S) = min(I, min_s phi_r(s) + s S) by concave conjugation.

    Without an explicit *s_grid*, the default slopes are refined with
    geometric midpoints wherever `slope_gaps` exceeds RESOLUTION_TOL. An
    explicit grid is used as given.
    """
    slopes = np.unique(np.asarray(default_slope_grid() if s_grid is None else s_grid))
    if slopes.size == 0 or slopes[0] <= 0.0:
        raise DomainError("s_grid", s_grid, "non-empty sets of positive slopes")
    info = mutual_information(family.base_joint())
    inner = replace(cfg, threads=1)

    def phi_at(values: FloatArray) -> FloatArray:
        return np.array(
            parallel_map(
                lambda s: max(support_value(family, r, float(s), inner), 0.0),
                values.tolist(),
                cfg.threads,
            )
        )

    phis = phi_at(slopes)
    gaps = slope_gaps(slopes, phis)
    for _ in range(REFINE_ROUNDS if s_grid is None else 0):
        coarse = np.flatnonzero(gaps > RESOLUTION_TOL)
        if coarse.size == 0:
            break
        added = np.sqrt(slopes[coarse] * slopes[coarse + 1])
        logger.debug(f"Refining the slope grid with {added.size} slopes")
        slopes = np.concatenate([slopes, added])
        phis = np.concatenate([phis, phi_at(added)])
        order = np.argsort(slopes)
        slopes, phis = slopes[order], phis[order]
        gaps = slope_gaps(slopes, phis)
    _check_resolution(gaps)

    supports = tuple((float(s), float(phi)) for s, phi in zip(slopes, phis))
    boundary = RateRegionBoundary(r, info, supports, ())
    if info <= 0.0:
        points = tuple((float(t), 0.0, float(slopes[0])) for t in (0.0, 1.0))
        return replace(boundary, points=points)

    totals = np.linspace(0.0, boundary.saturation, BOUNDARY_POINTS)
    lines = phis[:, None] + slopes[:, None] * totals[None, :]
    active = np.argmin(lines, axis=0)
    rates = np.clip(lines.min(axis=0), 0.0, info)
    points = tuple(
        (float(t), float(rate), float(slopes[k]))
        for t, rate, k in zip(totals, rates, active)
    )
    return replace(boundary, points=points)


@dataclass(frozen=True)
class ThresholdResult:
    """Bisection outcome for a strong data processing threshold.

    Attributes:
        s_star: Midpoint of the final bracket.
        bracket: (lo, hi) with phi(lo) above and phi(hi) at the zero threshold.
        iterations: Number of bisection steps.
    """

    s_star: float
    bracket: tuple[float, float]
    iterations: int


def _bisect_phi(
    phi_above: Callable[[float], bool], info: float, tol: float, bisect_tol: float
) -> ThresholdResult:
    if bisect_tol < 1e-6:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("bisect_tol", bisect_tol, "[1e-6, inf)")
    if info <= tol:
        return ThresholdResult(0.0, (0.0, 0.0), 0)
    if phi_above(1.0):
        raise InconsistencyError(
            "phi(1) is above the zero threshold: no scheme can have R > S."
        )
    lo, hi, iterations = 0.0, 1.0, 0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if phi_above(mid):
            lo = mid
        else:
            hi = mid
        iterations += 1
        logger.debug(f"Threshold bracket [{lo:.6f}, {hi:.6f}]")
    return ThresholdResult(0.5 * (lo + hi), (lo, hi), iterations)


def s_star(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    bisect_tol: float = DEFAULT_BISECT_TOL,
) -> ThresholdResult:
    """Smallest slope s at which phi_r(s) vanishes.

    With r = 1 this is the strong data processing constant of the source,
    with r = inf its symmetric counterpart.
    """
    cfg.validate()
    tol = zero_threshold(cfg)
    info = mutual_information(family.base_joint())

    def phi_above(s: float) -> bool:
        return support_value(family, r, s, cfg, stop_above=tol) > tol

    result = _bisect_phi(phi_above, info, tol, bisect_tol)
    logger.info(f"s*_{r} = {result.s_star:.6f} after {result.iterations} steps")
    return result


def kbib(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    bisect_tol: float = DEFAULT_BISECT_TOL,
) -> float:
    """Key bits per interaction bit, s*/(1 - s*); inf when s* reaches 1."""
    return kbib_from_threshold(s_star(family, r, cfg, bisect_tol))


def kbib_from_threshold(result: ThresholdResult) -> float:
    """KBIB of an already computed threshold."""
    if result.bracket[1] >= 1.0 and result.iterations > 0:
        return math.inf
    return result.s_star / (1.0 - result.s_star)


def gaussian_sstar(rho: float) -> float:
    """Threshold of a jointly Gaussian pair with correlation rho."""
    if not -1.0 <= rho <= 1.0:
        raise DomainError("rho", rho, "[-1, 1]")
    return rho**2


def gaussian_kbib(rho: float) -> float:
    """KBIB of a jointly Gaussian pair, rho^2 / (1 - rho^2)."""
    value = gaussian_sstar(rho)
    if value >= 1.0:
        return math.inf
    return value / (1.0 - value)


def _check_rounds_positive(r: Rounds) -> None:
    if r < 1:
        raise DomainError("r", r, "[1, inf]")


def mimk_sigma_route(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    indep_tol: float = INDEP_TOL,
) -> float:
    """MIMK as H(X|Y) + H(Y|X) - sigma_r(Q)."""
    _check_rounds_positive(r)
    h_x_given_y, h_y_given_x = conditional_entropies(family.base_joint())
    sigma = sigma_r(family, r, cfg, indep_tol).base_value()
    return max(h_x_given_y + h_y_given_x - sigma, 0.0)


@dataclass(frozen=True)
class LimitRoute:
    """MIMK estimates along a decreasing slope sequence.

    Attributes:
        value: Richardson extrapolation to s = 0.
        sequence: (s, estimate) pairs in the order evaluated.
    """

    value: float
    sequence: tuple[tuple[float, float], ...]


def richardson_at_zero(s: npt.ArrayLike, estimates: npt.ArrayLike) -> float:
    """Extrapolate the last three estimates to s = 0 with a quadratic."""
    s_arr = np.asarray(s, dtype=float)[-3:]
    e_arr = np.asarray(estimates, dtype=float)[-3:]
    degree = min(2, s_arr.size - 1)
    return float(np.polyval(np.polyfit(s_arr, e_arr, degree), 0.0))


def mimk_limit_route(
    family: ParamFamily,
    r: Rounds,
    cfg: EnvelopeConfig,
    s_seq: Sequence[float] = DEFAULT_S_SEQ,
) -> LimitRoute:
    """MIMK as H(X|Y) + H(Y|X) - lim (1/s) omega_r^s(Q) as s decreases to 0."""
    _check_rounds_positive(r)
    slopes = [float(s) for s in s_seq]
    decreasing = all(b < a for a, b in zip(slopes, slopes[1:]))
    if len(slopes) < 2 or not decreasing:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("s_seq", s_seq, "decreasing sequences of length >= 2")
    h_x_given_y, h_y_given_x = conditional_entropies(family.base_joint())
    inner = replace(cfg, threads=1)
    omegas = parallel_map(
        lambda s: omega_r(s, family, r, inner).base_value(), slopes, cfg.threads
    )
    estimates = [h_x_given_y + h_y_given_x - w / s for s, w in zip(slopes, omegas)]

    tail = np.diff(estimates[-3:])
    if not (np.all(tail >= 0) or np.all(tail <= 0)):
        warnings.warn(
            ExtrapolationWarning(f"Non-monotone tail {estimates[-3:]}."), stacklevel=2
        )
    value = richardson_at_zero(slopes, estimates)
    return LimitRoute(max(value, 0.0), tuple(zip(slopes, estimates)))


@dataclass(frozen=True)
class TyagiReport:
    """Whether one-way communication already achieves the MIMK.

    Attributes:
        sigma1: One X-pass envelope at Q.
        sigma3: Three alternating passes at Q.
        sigma_inf: Full envelope at Q.
        sigma1_transposed: One pass in the transposed orientation.
        conditional_sum: H(X|Y) + H(Y|X).
        verdict: "one-way-optimal" or "interaction-helps".
    """

    sigma1: float
    sigma3: float
    sigma_inf: float
    sigma1_transposed: float
    conditional_sum: float
    verdict: str

    @property
    def one_way_mimk(self) -> float:
        """Best one-way MIMK over both orientations."""
        return self.conditional_sum - max(self.sigma1, self.sigma1_transposed)

    @property
    def interactive_mimk(self) -> float:
        """MIMK with unlimited interaction."""
        return self.conditional_sum - self.sigma_inf


def tyagi_check(family: ParamFamily, cfg: EnvelopeConfig) -> TyagiReport:
    """Compare one-way and interactive MIMK of a binary source."""
    h_x_given_y, h_y_given_x = conditional_entropies(family.base_joint())
    conditional_sum = h_x_given_y + h_y_given_x
    sigma1 = sigma_r(family, 1, cfg).base_value()
    sigma3 = sigma_r(family, 3, cfg).base_value()
    sigma_inf = sigma_r(family, math.inf, cfg).base_value()
    sigma1_t = sigma_r(family.transposed(), 1, cfg).base_value()

    one_way = conditional_sum - max(sigma1, sigma1_t)
    interactive = conditional_sum - sigma_inf
    optimal = abs(one_way - interactive) <= 2.0 * cfg.grid_tol
    verdict = "one-way-optimal" if optimal else "interaction-helps"
    logger.info(f"One-way MIMK {one_way:.6f}, interactive {interactive:.6f}")
    return TyagiReport(sigma1, sigma3, sigma_inf, sigma1_t, conditional_sum, verdict)


@dataclass(frozen=True)
class ConverseBound:
    """Finite-blocklength upper bound on log K / log W.

    Attributes:
        bound: The upper bound, inf when the correction factor is not positive.
        ratio: The evaluated log K / log W.
    """

    bound: float
    ratio: float

    @property
    def consistent(self) -> bool:
        """Whether the given rates respect the bound."""
        return self.ratio <= self.bound


def converse_bound(log_k: float, log_w: float, delta: float, s: float) -> ConverseBound:
    """Bound on key length per communication length at error delta.

    The blocklength does not enter; *s* is a threshold of the source.
    """
    if not log_k > 0.0:
        raise DomainError("logK", log_k, "(0, inf)")
    if not log_w > 0.0:
        raise DomainError("logW", log_w, "(0, inf)")
    if not 0.0 < delta < 1.0:
        raise DomainError("delta", delta, "(0, 1)")
    if not 0.0 < s < 1.0:
        raise DomainError("s", s, "(0, 1)")

    penalty = (
        2.0 * delta * math.log(1.0 / (2.0 * delta))
        + (1.0 + s) / (1.0 - s) * math.log(2.0)
    ) / log_k
    factor = 1.0 - (7.0 - 5.0 * s) / (1.0 - s) * delta - penalty
    bound = math.inf if factor <= 0.0 else s / (1.0 - s) / factor
    return ConverseBound(bound, log_k / log_w)


def one_way_threshold(
    joint: JointDist,
    grid_n: int = 2001,
    bisect_tol: float = DEFAULT_BISECT_TOL,
    sup_norm_tol: float = 1e-8,
) -> ThresholdResult:
    """Strong data processing constant of a source with binary X.

    The X-fiber through Q keeps Q_{Y|X} and moves P_X(1) over [0, 1]; one
    concavification along it gives phi_1.
    """
    if joint.m != 2:  # noqa: PLR2004 [magic-value-comparison]
        raise DomainError("|X|", joint.m, "binary alphabets")
    px = joint.p_x
    if np.any(px <= 0.0):
        return ThresholdResult(0.0, (0.0, 0.0), 0)
    kernel = joint.matrix / px[:, None]
    base = float(px[1])
    weights = np.union1d(np.linspace(0.0, 1.0, grid_n), [base])
    entries = np.stack([1.0 - weights, weights], axis=-1)[..., None] * kernel
    h_xy, info_grid = grid_information(entries)
    node = int(np.searchsorted(weights, base))
    h_q, info_q = joint_entropy(joint), mutual_information(joint)
    tol = 3.0 * sup_norm_tol

    def phi_above(s: float) -> bool:
        hull = upper_concave_hull_1d(weights, s * h_xy - info_grid)
        return float(hull[node] - (s * h_q - info_q)) > tol

    return _bisect_phi(phi_above, info_q, tol, bisect_tol)


def one_way_curve(
    epsilon: float, alphas: npt.ArrayLike
) -> list[tuple[float, float, float]]:
    """One-way (alpha, S, R) points of a BSS with a symmetric binary auxiliary.

    S = I(U;X) = ln 2 - h(alpha) is the total rate and R = I(U;Y) the key rate.
    """
    ln2 = math.log(2.0)
    return [
        (
            float(a),
            ln2 - binary_entropy(float(a)),
            ln2 - binary_entropy(binary_convolution(float(a), epsilon)),
        )
        for a in np.asarray(alphas, dtype=float)
    ]


