"""Unit tests for the gnuplot formatter."""

from keyrate.formatters.gnuplot_formatter import GnuplotFormatter


def test_gnuplot_formatter(run_config, report):
    """Ensure tables and grids are laid out for gnuplot's index."""
    lines = GnuplotFormatter(run_config=run_config).format(report).splitlines()
    assert lines[0].startswith("# keyrate ")
    assert lines[1] == "# Example (nats)"
    assert "# info = 0.5" in lines
    table = lines.index("# S R s")
    assert lines[table + 1 : table + 5] == ["0.0 0.0 1.0", "0.5 0.25 0.5", "", ""]
    assert lines[table + 5 :] == [
        "# field: rows f, columns g",
        "# axis 0.0 0.5 1.0",
        "-inf 0.0 1.0",
        "0.0 1.0 2.0",
        "1.0 2.0 2.0",
    ]


def test_gnuplot_formatter_bits(bits_run_config, report):
    """Ensure the unit is named in the title line."""
    lines = GnuplotFormatter(run_config=bits_run_config).format(report).splitlines()
    assert lines[1] == "# Example (bits)"
