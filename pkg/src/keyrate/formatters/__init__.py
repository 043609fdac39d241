"""Formatters are used to output CLI results."""

from __future__ import annotations

import math
import os
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any

import numpy as np

from keyrate.core import FloatArray
from keyrate.run_config import RunConfig, keyrate_version

LN2 = math.log(2.0)


@dataclass(frozen=True)
class Table:
    """Rows of numbers under named columns."""

    columns: tuple[str, ...]
    rows: list[tuple[Any, ...]]


@dataclass(frozen=True, eq=False)
class Matrix:
    """A field sampled on a square grid, rows indexed by f and columns by g.

    Attributes:
        axis: Grid coordinates shared by f and g.
        values: The samples; -inf where the field is undefined.
        nats: Whether the samples are information quantities in nats.
    """

    axis: FloatArray
    values: FloatArray
    nats: bool = True


@dataclass
class Report:
    """Result of one command, independent of how it is shown.

    Attributes:
        title: One-line description.
        values: Scalars in display order.
        nats: Keys of values and table columns measured in nats.
        volatile: Keys of values that change between identical runs.
        table: Optional table of rows.
        matrices: Named grids.
    """

    title: str
    values: dict[str, Any] = field(default_factory=dict)
    nats: frozenset[str] = frozenset()
    volatile: frozenset[str] = frozenset()
    table: Table | None = None
    matrices: dict[str, Matrix] = field(default_factory=dict)


def timestamp() -> str:
    """UTC time of the run, pinned by SOURCE_DATE_EPOCH when it is set."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    moment = (
        datetime.fromtimestamp(int(epoch), tz=timezone.utc)
        if epoch
        else datetime.now(tz=timezone.utc)
    )
    return moment.replace(microsecond=0).isoformat().replace("+00:00", "Z")


class Formatter(ABC):
    """Abstract class to define a formatter."""

    def __init__(self, run_config: RunConfig):
        """Instantiate a formatter."""
        self._run_config = run_config

    @property
    def unit(self) -> str:
        """Name of the information unit shown."""
        return "bits" if self._run_config.bits else "nats"

    def header(self) -> str:
        """Provenance line for file formats."""
        return (
            f"keyrate {keyrate_version()} "
            f"config={self._run_config.config_hash} time={timestamp()}"
        )

    def scaled(self, report: Report, key: str, value: Any) -> Any:
        """Value in display units."""
        if self._run_config.bits and key in report.nats:
            return self.to_bits(value)
        return value

    def scaled_row(self, report: Report, row: tuple[Any, ...]) -> tuple[Any, ...]:
        """Table row in display units."""
        assert report.table is not None
        return tuple(
            self.scaled(report, column, value)
            for column, value in zip(report.table.columns, row)
        )

    def scaled_matrix(self, matrix: Matrix) -> FloatArray:
        """Matrix samples in display units."""
        if self._run_config.bits and matrix.nats:
            return matrix.values / LN2
        return matrix.values

    @staticmethod
    def to_bits(value: Any) -> Any:
        """Convert nats to bits, leaving non-numbers alone."""
        if isinstance(value, bool):
            return value
        if isinstance(value, (int, float, np.floating)):
            return float(value) / LN2
        if isinstance(value, tuple):
            return tuple(Formatter.to_bits(v) for v in value)
        return value

    @abstractmethod
    def format(self, report: Report) -> str:
        """Render a report."""
        raise NotImplementedError
