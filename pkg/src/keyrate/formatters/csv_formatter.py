"""CSV formatter.

Comment lines starting with ``#`` carry the provenance header and the
scalar values; the body is the report's table, or ``f,g,value`` rows of its
grids, or ``key,value`` rows when the report has neither.
"""

import csv
import io

from keyrate.formatters import Formatter, Report


class CSVFormatter(Formatter):
    """Formatter for comma-separated output."""

    def format(self, report: Report) -> str:
        """Render the report as CSV."""
        buffer = io.StringIO()
        buffer.write(f"# {self.header()}\n")
        buffer.write(f"# title={report.title}\n")
        buffer.write(f"# units={self.unit}\n")
        writer = csv.writer(buffer, lineterminator="\n")

        if report.table is None and not report.matrices:
            writer.writerow(["key", "value"])
            for key, value in report.values.items():
                writer.writerow([key, self.scaled(report, key, value)])
            return buffer.getvalue()

        for key, value in report.values.items():
            buffer.write(f"# {key}={self.scaled(report, key, value)}\n")
        if report.table is not None:
            writer.writerow(report.table.columns)
            for row in report.table.rows:
                writer.writerow(self.scaled_row(report, row))
        for name, matrix in report.matrices.items():
            values = self.scaled_matrix(matrix)
            buffer.write(f"# field={name}\n")
            writer.writerow(["f", "g", "value"])
            for i, f in enumerate(matrix.axis):
                for j, g in enumerate(matrix.axis):
                    writer.writerow([float(f), float(g), float(values[i, j])])
        return buffer.getvalue()
