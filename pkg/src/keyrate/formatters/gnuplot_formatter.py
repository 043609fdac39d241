"""Gnuplot formatter.

Tables are whitespace-separated columns. Each grid is written in gnuplot's
matrix layout, one line per f value; grids are separated by two blank lines
so that ``index`` selects them.
"""

from keyrate.formatters import Formatter, Report


class GnuplotFormatter(Formatter):
    """Formatter for gnuplot data files."""

    def format(self, report: Report) -> str:
        """Render the report as a gnuplot data file."""
        lines = [f"# {self.header()}", f"# {report.title} ({self.unit})"]
        for key, value in report.values.items():
            lines.append(f"# {key} = {self.scaled(report, key, value)}")

        if report.table is not None:
            lines.append("# " + " ".join(report.table.columns))
            for row in report.table.rows:
                lines.append(
                    " ".join(repr(float(v)) for v in self.scaled_row(report, row))
                )

        for index, (name, matrix) in enumerate(report.matrices.items()):
            if index or report.table is not None:
                lines.extend(["", ""])
            values = self.scaled_matrix(matrix)
            lines.append(f"# {name}: rows f, columns g")
            lines.append("# axis " + " ".join(repr(float(t)) for t in matrix.axis))
            for row in values:
                lines.append(" ".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"
