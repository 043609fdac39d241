"""Finite-alphabet distributions, information measures and lower-set charts.

All information quantities are in nats. Probability inputs are validated with
an absolute tolerance of `INPUT_TOL` and renormalized to sum exactly to one.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Final, TypeAlias

import numpy as np
import numpy.typing as npt

from keyrate.exceptions import (
    DomainError,
    InvalidDistributionError,
    NotAbsolutelyContinuousError,
    NotInLowerSetError,
    SingularParameterError,
)

logger = logging.getLogger(__name__)

FloatArray: TypeAlias = npt.NDArray[np.float64]

INPUT_TOL: Final[float] = 1e-9
ROUND_TRIP_TOL: Final[float] = 1e-9
FACTOR_TOL: Final[float] = 1e-9


def _check_unit_interval(name: str, value: float) -> float:
    if not (0.0 <= value <= 1.0):
        raise DomainError(name, value, "[0, 1]")
    return float(value)


def _validate_probabilities(values: npt.ArrayLike, name: str) -> FloatArray:
    """Validate a probability array and renormalize it."""
    array = np.array(values, dtype=float)
    if array.size == 0 or not np.all(np.isfinite(array)):
        raise InvalidDistributionError(f"{name} must be a non-empty finite array.")
    if np.any(array < -INPUT_TOL):
        raise InvalidDistributionError(f"{name} has a negative entry.")
    total = float(array.sum())
    if abs(total - 1.0) > INPUT_TOL:
        raise InvalidDistributionError(f"{name} sums to {total!r}, not 1.")
    array = np.clip(array, 0.0, None)
    return array / array.sum()


def neg_xlogx(p: npt.ArrayLike) -> FloatArray:
    """Elementwise -p ln p with the convention 0 ln 0 = 0."""
    array = np.asarray(p, dtype=float)
    positive = array > 0
    safe = np.where(positive, array, 1.0)
    return np.where(positive, -array * np.log(safe), 0.0)


def compensated_sum(terms: npt.ArrayLike, axis: int = -1) -> FloatArray:
    """Neumaier-compensated sum of sorted terms along an axis.

    Sorting makes the result independent of the order of the terms, so
    quantities built from it are exactly invariant under permutations.
    """
    ordered = np.sort(np.moveaxis(np.asarray(terms, dtype=float), axis, -1), axis=-1)
    total = np.zeros(ordered.shape[:-1])
    compensation = np.zeros(ordered.shape[:-1])
    for k in range(ordered.shape[-1]):
        term = ordered[..., k]
        partial = total + term
        compensation += np.where(
            np.abs(total) >= np.abs(term),
            (total - partial) + term,
            (term - partial) + total,
        )
        total = partial
    return total + compensation


def entropy(dist: npt.ArrayLike) -> float:
    """Shannon entropy of a probability vector, in nats."""
    p = _validate_probabilities(dist, "distribution")
    return math.fsum(neg_xlogx(p).ravel())


def binary_entropy(p: float) -> float:
    """Binary entropy h(p) in nats."""
    p = _check_unit_interval("p", p)
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log1p(-p)


def binary_entropy_array(p: npt.ArrayLike) -> FloatArray:
    """Vectorized binary entropy, no domain checks."""
    array = np.asarray(p, dtype=float)
    return neg_xlogx(array) + neg_xlogx(1.0 - array)


def binary_convolution(a: float, b: float) -> float:
    """Binary convolution a*b = (1-a)b + a(1-b)."""
    a = _check_unit_interval("a", a)
    b = _check_unit_interval("b", b)
    return (1.0 - a) * b + a * (1.0 - b)


@dataclass(frozen=True, eq=False)
class JointDist:
    """A joint probability matrix on finite alphabets.

    Attributes:
        matrix: The |X| x |Y| probability matrix (read-only after validation).
        labels_x: Names of the X symbols.
        labels_y: Names of the Y symbols.
    """

    matrix: FloatArray
    labels_x: tuple[str, ...] = ()
    labels_y: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        """Validate, renormalize and freeze the matrix."""
        raw = np.array(self.matrix, dtype=float)
        if raw.ndim != 2:  # noqa: PLR2004 [magic-value-comparison]
            raise InvalidDistributionError("A joint distribution must be a matrix.")
        matrix = _validate_probabilities(raw, "joint distribution").reshape(raw.shape)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

        labels_x = tuple(self.labels_x) or tuple(str(i) for i in range(raw.shape[0]))
        labels_y = tuple(self.labels_y) or tuple(str(j) for j in range(raw.shape[1]))
        if len(labels_x) != raw.shape[0] or len(labels_y) != raw.shape[1]:
            raise InvalidDistributionError("Labels do not match the matrix shape.")
        object.__setattr__(self, "labels_x", labels_x)
        object.__setattr__(self, "labels_y", labels_y)

    @property
    def m(self) -> int:
        """Size of the X alphabet."""
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        """Size of the Y alphabet."""
        return int(self.matrix.shape[1])

    @property
    def p_x(self) -> FloatArray:
        """X marginal as a column vector."""
        return self.matrix.sum(axis=1)

    @property
    def p_y(self) -> FloatArray:
        """Y marginal as a column vector."""
        return self.matrix.sum(axis=0)

    def transpose(self) -> JointDist:
        """Swap the roles of X and Y."""
        return JointDist(self.matrix.T, self.labels_y, self.labels_x)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to the JSON document shape."""
        return {
            "matrix": self.matrix.tolist(),
            "labels_x": list(self.labels_x),
            "labels_y": list(self.labels_y),
        }

    @classmethod
    def from_dict(cls, values: dict[str, Any]) -> JointDist:
        """Create a distribution from its JSON document shape."""
        if not isinstance(values, dict) or "matrix" not in values:
            raise InvalidDistributionError("Missing key `matrix`.")
        try:
            matrix = np.array(values["matrix"], dtype=float)
        except (TypeError, ValueError) as e:
            raise InvalidDistributionError(f"Unreadable matrix: {e}.") from e
        return cls(
            matrix,
            tuple(str(label) for label in values.get("labels_x", [])),
            tuple(str(label) for label in values.get("labels_y", [])),
        )

    @classmethod
    def from_json(cls, text: str, source: str = "<string>") -> JointDist:
        """Parse a JSON document, reporting the line of syntax errors."""
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise InvalidDistributionError(
                f"{source}:{e.lineno}:{e.colno}: {e.msg}."
            ) from e
        return cls.from_dict(values)

    @classmethod
    def load(cls, path: Path) -> JointDist:
        """Load a distribution from a JSON file."""
        return cls.from_json(path.read_text(encoding="utf-8"), source=str(path))

    def dumps(self) -> str:
        """Serialize to a JSON document."""
        return json.dumps(self.to_dict(), indent=2)


def joint_entropy(joint: JointDist) -> float:
    """H(X,Y) in nats."""
    return math.fsum(neg_xlogx(joint.matrix).ravel())


def mutual_information(joint: JointDist) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y) in nats, tiny negatives clamped to 0."""
    value = math.fsum(
        [
            *neg_xlogx(joint.p_x),
            *neg_xlogx(joint.p_y),
            *(-neg_xlogx(joint.matrix).ravel()),
        ]
    )
    return max(value, 0.0)


def conditional_entropies(joint: JointDist) -> tuple[float, float]:
    """Return (H(X|Y), H(Y|X)) in nats."""
    h_xy = joint_entropy(joint)
    h_x = math.fsum(neg_xlogx(joint.p_x))
    h_y = math.fsum(neg_xlogx(joint.p_y))
    return max(h_xy - h_y, 0.0), max(h_xy - h_x, 0.0)


def grid_information(entries: FloatArray) -> tuple[FloatArray, FloatArray]:
    """Joint entropy and mutual information of stacked matrices (..., m, n)."""
    h_xy = neg_xlogx(entries).sum(axis=(-2, -1))
    h_x = neg_xlogx(entries.sum(axis=-1)).sum(axis=-1)
    h_y = neg_xlogx(entries.sum(axis=-2)).sum(axis=-1)
    return h_xy, np.maximum(h_x + h_y - h_xy, 0.0)


def binary_symmetric_source(epsilon: float) -> JointDist:
    """Equiprobable binary X with Y = X flipped with probability epsilon."""
    e = _check_unit_interval("epsilon", epsilon)
    return JointDist(0.5 * np.array([[1.0 - e, e], [e, 1.0 - e]]))


def binary_erasure_source(epsilon: float, p1: float = 0.5) -> JointDist:
    """Binary X observed through an erasure channel, Y in {0, e, 1}."""
    e = _check_unit_interval("epsilon", epsilon)
    p1 = _check_unit_interval("p1", p1)
    matrix = np.array(
        [
            [(1.0 - p1) * (1.0 - e), (1.0 - p1) * e, 0.0],
            [0.0, p1 * e, p1 * (1.0 - e)],
        ]
    )
    return JointDist(matrix, ("0", "1"), ("0", "e", "1"))


def product_distribution(p_x: npt.ArrayLike, p_y: npt.ArrayLike) -> JointDist:
    """The independent coupling of two marginals."""
    px = _validate_probabilities(p_x, "X marginal")
    py = _validate_probabilities(p_y, "Y marginal")
    return JointDist(np.outer(px, py))


class Variant(str, Enum):
    """The two-parameter lower-set charts."""

    BSC_KERNEL = "bsc-kernel"
    SUPPORT_THREE = "support-three"


@dataclass(frozen=True)
class ParamFamily:
    """A chart (f, g) -> P_XY onto the lower set of a binary source.

    Attributes:
        variant: Which chart.
        epsilon: Crossover probability of the BSC kernel (BSC_KERNEL only).
        base: Chart coordinates of the source distribution Q_XY.
    """

    variant: Variant = Variant.BSC_KERNEL
    epsilon: float = 0.0
    base: tuple[float, float] = (0.5, 0.5)

    def __post_init__(self) -> None:
        """Validate the family and its base point."""
        _check_unit_interval("epsilon", self.epsilon)
        f0, g0 = self.base
        _check_unit_interval("f", f0)
        _check_unit_interval("g", g0)
        object.__setattr__(self, "variant", Variant(self.variant))
        object.__setattr__(self, "base", (float(f0), float(g0)))
        param_to_joint(self, f0, g0)

    @classmethod
    def bsc_kernel(
        cls, epsilon: float, base: tuple[float, float] = (0.5, 0.5)
    ) -> ParamFamily:
        """Fully supported chart around a BSC kernel."""
        return cls(Variant.BSC_KERNEL, epsilon, base)

    @classmethod
    def support_three(cls, base: tuple[float, float] = (0.5, 0.5)) -> ParamFamily:
        """Chart of a binary source with Q_XY(0, 0) = 0."""
        return cls(Variant.SUPPORT_THREE, 0.0, base)

    def base_joint(self) -> JointDist:
        """The source distribution Q_XY."""
        return param_to_joint(self, *self.base)

    def transposed(self) -> ParamFamily:
        """The family of the transposed source.

        Both charts satisfy P(f, g)^T = P(g, f), so transposing the source
        swaps the chart axes.
        """
        f0, g0 = self.base
        return ParamFamily(self.variant, self.epsilon, (g0, f0))


def chart_entries(
    family: ParamFamily, f: npt.ArrayLike, g: npt.ArrayLike
) -> tuple[FloatArray, FloatArray]:
    """Unnormalized chart matrices (..., 2, 2) and their normalizers.

    Cells whose normalizer is not positive are singular.
    """
    f_arr, g_arr = np.broadcast_arrays(
        np.asarray(f, dtype=float), np.asarray(g, dtype=float)
    )
    fb, gb = 1.0 - f_arr, 1.0 - g_arr
    raw = np.empty(f_arr.shape + (2, 2))
    if family.variant is Variant.BSC_KERNEL:
        e = family.epsilon
        raw[..., 0, 0] = (1.0 - e) * fb * gb
        raw[..., 0, 1] = e * fb * g_arr
        raw[..., 1, 0] = e * f_arr * gb
        raw[..., 1, 1] = (1.0 - e) * f_arr * g_arr
    else:
        raw[..., 0, 0] = 0.0
        raw[..., 0, 1] = fb * g_arr
        raw[..., 1, 0] = f_arr * gb
        raw[..., 1, 1] = f_arr * g_arr
    return raw, raw.sum(axis=(-2, -1))


def param_to_joint(family: ParamFamily, f: float, g: float) -> JointDist:
    """Map chart coordinates to a distribution of the lower set."""
    f = _check_unit_interval("f", f)
    g = _check_unit_interval("g", g)
    raw, normalizer = chart_entries(family, f, g)
    if not normalizer > 0.0:
        raise SingularParameterError(f, g)
    return JointDist(raw / normalizer, ("0", "1"), ("0", "1"))


def joint_to_param(family: ParamFamily, joint: JointDist) -> tuple[float, float]:
    """Invert the chart; the distribution must lie in the family's image."""
    if joint.matrix.shape != (2, 2):
        raise NotInLowerSetError("Chart families live on binary alphabets.")
    p = joint.matrix
    if family.variant is Variant.BSC_KERNEL:
        e = family.epsilon
        if not 0.0 < e < 1.0:
            raise DomainError("epsilon", e, "(0, 1) for a unique inverse")
        factors = p / np.array([[1.0 - e, e], [e, 1.0 - e]])
        total = factors.sum()
        f = float((factors[1, 0] + factors[1, 1]) / total)
        g = float((factors[0, 1] + factors[1, 1]) / total)
    else:
        if p[0, 0] > ROUND_TRIP_TOL:
            raise NotInLowerSetError("Support-three chart requires P(0, 0) = 0.")
        column, row = p[0, 1] + p[1, 1], p[1, 0] + p[1, 1]
        if column <= 0.0 or row <= 0.0:
            raise SingularParameterError(
                float("nan"), float("nan"), "point mass has no unique chart coordinate"
            )
        f = float(p[1, 1] / column)
        g = float(p[1, 1] / row)

    try:
        image = param_to_joint(family, min(max(f, 0.0), 1.0), min(max(g, 0.0), 1.0))
    except SingularParameterError as e:
        raise NotInLowerSetError(f"No chart point maps to {p.tolist()}.") from e
    if np.max(np.abs(image.matrix - p)) > ROUND_TRIP_TOL:
        raise NotInLowerSetError(
            f"Distribution {p.tolist()} is not in the lower set of the family."
        )
    return f, g


@dataclass(frozen=True, eq=False)
class FactorPair:
    """Factors of an XY-absolutely-continuous density, d nu/d mu = f(x) g(y)."""

    fvec: FloatArray
    gvec: FloatArray

    def density(self) -> FloatArray:
        """The rank-one density matrix."""
        return np.outer(self.fvec, self.gvec)


@dataclass(frozen=True)
class Components:
    """Connected components of the bipartite support graph.

    Each component is a pair (X symbols, Y symbols). Symbols with zero
    marginal mass do not belong to the graph.
    """

    parts: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    @property
    def is_indecomposable(self) -> bool:
        """Whether the support graph is connected."""
        return len(self.parts) == 1


def _bipartite_components(adjacency: npt.NDArray[np.bool_]) -> Components:
    m, n = adjacency.shape
    live_x = adjacency.any(axis=1)
    seen_x = np.zeros(m, dtype=bool)
    seen_y = np.zeros(n, dtype=bool)
    parts: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for start in range(m):
        if seen_x[start] or not live_x[start]:
            continue
        xs: list[int] = [start]
        ys: list[int] = []
        seen_x[start] = True
        queue: deque[tuple[str, int]] = deque([("x", start)])
        while queue:
            side, index = queue.popleft()
            if side == "x":
                for y in np.flatnonzero(adjacency[index] & ~seen_y):
                    seen_y[y] = True
                    ys.append(int(y))
                    queue.append(("y", int(y)))
            else:
                for x in np.flatnonzero(adjacency[:, index] & ~seen_x):
                    seen_x[x] = True
                    xs.append(int(x))
                    queue.append(("x", int(x)))
        parts.append((tuple(sorted(xs)), tuple(sorted(ys))))
    return Components(tuple(parts))


def connected_components(joint: JointDist) -> Components:
    """Components of the bipartite graph of positive entries."""
    return _bipartite_components(joint.matrix > 0)


def check_xy_abs_continuity(nu: JointDist, mu: JointDist) -> FactorPair | None:
    """Factor d nu/d mu as f(x) g(y) on the support of mu.

    Returns None when the density is not rank-one factorizable.

    Raises:
        NotAbsolutelyContinuousError: nu charges a cell outside supp(mu).
    """
    if nu.matrix.shape != mu.matrix.shape:
        raise NotAbsolutelyContinuousError("Distributions live on different alphabets.")
    support = mu.matrix > 0
    if np.any(nu.matrix[~support] > 0):
        raise NotAbsolutelyContinuousError("supp(nu) is not contained in supp(mu).")

    ratio = np.zeros_like(mu.matrix)
    ratio[support] = nu.matrix[support] / mu.matrix[support]
    m, n = ratio.shape
    fvec = np.zeros(m)
    gvec = np.zeros(n)

    # Rows or columns where the density vanishes carry a zero factor; the rest
    # of the graph must then be positive wherever mu is.
    positive = ratio > 0
    for xs, _ in _bipartite_components(positive).parts:
        anchor = xs[0]
        fvec[anchor] = 1.0
        queue: deque[tuple[str, int]] = deque([("x", anchor)])
        assigned_x: set[int] = {anchor}
        assigned_y: set[int] = set()
        while queue:
            side, index = queue.popleft()
            if side == "x":
                for y in np.flatnonzero(positive[index]):
                    if int(y) not in assigned_y:
                        gvec[y] = ratio[index, y] / fvec[index]
                        assigned_y.add(int(y))
                        queue.append(("y", int(y)))
            else:
                for x in np.flatnonzero(positive[:, index]):
                    if int(x) not in assigned_x:
                        fvec[x] = ratio[x, index] / gvec[index]
                        assigned_x.add(int(x))
                        queue.append(("x", int(x)))

    residual = np.abs(np.outer(fvec, gvec) - ratio)[support]
    scale = np.maximum(1.0, ratio[support])
    if np.any(residual > FACTOR_TOL * scale):
        logger.debug("Density is not rank-one on the support of the reference.")
        return None
    return FactorPair(fvec, gvec)
