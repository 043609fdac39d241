"""This module is responsible for loading configuration."""

import logging
import sys
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Final

from keyrate.envelope import INDEP_TOL, EnvelopeConfig
from keyrate.rates import DEFAULT_BISECT_TOL
from keyrate.workers import available_threads

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = "pyproject.toml"


class Config:
    """Configuration for keyrate."""

    _main_section: Final[str] = "tool.keyrate"
    _options: Final[list[str]] = [
        "threads",
        "bits",
        "allow_warn",
        "output_format",
        "bisect_tol",
        "indep_tol",
        "sweep_step",
    ]
    _envelope_section: Final[str] = "envelope"

    def __init__(self) -> None:
        """Initialize the Config object."""
        self.threads: int = available_threads()
        self.bits: bool = False
        self.allow_warn: bool = False
        self.output_format: str = "plain"
        self.bisect_tol: float = DEFAULT_BISECT_TOL
        self.indep_tol: float = INDEP_TOL
        self.sweep_step: float = 0.01
        self.envelope: EnvelopeConfig = EnvelopeConfig()
        self.config_file: Path | None = None
        self.config_text: str | None = None

    def set_option(self, option: str, value: Any) -> None:
        """Set an option in the config."""
        setattr(self, option, value)

    def _load_toml_file(self, file: str) -> None:
        """Load the options from a TOML file."""
        with open(file, "rb") as f:
            toml_data = tomllib.load(f)

        tools = toml_data.get("tool", {})
        keyrate_config = tools.get("keyrate", {})
        envelope_config = keyrate_config.pop(self._envelope_section, {})

        # Main configuration
        for option, value in keyrate_config.items():
            if option in self._options:
                self.set_option(option, value)
            elif not isinstance(value, dict):
                logger.warning(
                    f"Option {option} in {self._main_section} not supported."
                )

        # Envelope configuration
        try:
            self.envelope = replace(self.envelope, **envelope_config)
        except TypeError as e:
            options = [f.name for f in fields(EnvelopeConfig)]
            raise AttributeError(
                f"Section {self._envelope_section}: config only accepts {options}."
            ) from e
        self.envelope.validate()

        self.config_file = Path(file)
        self._sync_threads()

    def _sync_threads(self) -> None:
        self.threads = max(1, int(self.threads))
        self.envelope = replace(self.envelope, threads=self.threads)

    @staticmethod
    def get_config_file(directory: Path) -> Path | None:
        """Get the config file."""
        candidates = [directory]
        candidates.extend(directory.parents)
        for path in candidates:
            config_file = path / DEFAULT_CONFIG_FILE
            if config_file.exists():
                return config_file
        return None

    def load(self, config_file: Path | None = None) -> None:
        """Load the config.

        An explicit batch file is echoed verbatim into every output, the
        discovered pyproject.toml is not.
        """
        if config_file:
            self._load_toml_file(str(config_file))
            self.config_text = config_file.read_text(encoding="utf-8")
            return
        discovered = self.get_config_file(Path.cwd())
        if discovered:
            logger.info(f"Loading configuration from {discovered}")
            self._load_toml_file(str(discovered))

    def overload(self, values: dict[str, Any]) -> None:
        """Overload config with additional values."""
        envelope_keys = {f.name for f in fields(EnvelopeConfig)} - {"threads"}
        envelope_values: dict[str, Any] = {}
        for key, value in values.items():
            if key in envelope_keys:
                envelope_values[key] = value
            else:
                self.set_option(key, value)
        if envelope_values:
            self.envelope = replace(self.envelope, **envelope_values)
            self.envelope.validate()
        self._sync_threads()
