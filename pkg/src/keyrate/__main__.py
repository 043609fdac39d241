"""Run keyrate with `python -m keyrate` or the `keyrate` script."""

import logging
import sys

from keyrate.cli import cli

LOG_FORMAT = "%(asctime)s %(levelname)s [%(name)s] %(message)s"


def configure_stderr_logging(level: int = logging.WARNING) -> None:
    """Send log records to stderr, keeping stdout for reports.

    `keyrate --verbose` lowers the handler level to INFO.
    """
    logging.basicConfig(format=LOG_FORMAT, handlers=[logging.StreamHandler(sys.stderr)])
    for handler in logging.getLogger().handlers:
        handler.setLevel(level)


def main() -> None:
    """Console script of keyrate."""
    configure_stderr_logging()
    cli()


if __name__ == "__main__":
    main()
