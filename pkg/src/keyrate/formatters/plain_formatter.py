"""Human readable formatter."""

from typing import Any

import numpy as np

from keyrate.formatters import Formatter, Report


class PlainFormatter(Formatter):
    """Formatter for human-readable messages in the terminal."""

    indent = "    "

    @staticmethod
    def bold(text: str) -> str:
        """Return text in bold."""
        return f"\033[1m{text}\033[0m"

    @staticmethod
    def pretty(value: Any) -> str:
        """Short rendering of a scalar."""
        if isinstance(value, (bool, np.bool_)):
            return "yes" if value else "no"
        if isinstance(value, (float, np.floating)):
            return f"{float(value):.10g}"
        if isinstance(value, tuple):
            return "(" + ", ".join(PlainFormatter.pretty(v) for v in value) + ")"
        return str(value)

    def format(self, report: Report) -> str:
        """Render the report for a terminal."""
        lines = [self.bold(report.title)]
        for key, value in report.values.items():
            unit = f" {self.unit}" if key in report.nats else ""
            shown = self.pretty(self.scaled(report, key, value))
            lines.append(f"{self.indent}{key}: {shown}{unit}")

        if report.table is not None:
            lines.append("")
            header = [
                f"{column} [{self.unit}]" if column in report.nats else column
                for column in report.table.columns
            ]
            cells = [
                [self.pretty(value) for value in self.scaled_row(report, row)]
                for row in report.table.rows
            ]
            widths = [
                max(len(text) for text in column)
                for column in zip(header, *cells)
            ]
            for row in [header, *cells]:
                lines.append(
                    self.indent
                    + "  ".join(text.rjust(width) for text, width in zip(row, widths))
                )

        for name, matrix in report.matrices.items():
            values = self.scaled_matrix(matrix)
            finite = values[np.isfinite(values)]
            size = matrix.axis.size
            summary = f"{self.indent}{name}: {size}x{size} grid"
            if finite.size:
                low, high = self.pretty(finite.min()), self.pretty(finite.max())
                summary += f", min {low}, max {high}"
            lines.append(summary)
        return "\n".join(lines) + "\n"
