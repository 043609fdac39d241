"""Description of a single CLI run, echoed into every output."""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as package_version
from pathlib import Path
from typing import Any

from keyrate.envelope import EnvelopeConfig

logger = logging.getLogger(__name__)


def keyrate_version() -> str:
    """Installed version of keyrate."""
    try:
        return package_version("keyrate")
    except PackageNotFoundError:
        return "0.0.0"


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run.

    Attributes:
        command: Name of the CLI command.
        parameters: Command arguments, in the order they were declared.
        envelope: Envelope settings, None for commands without envelopes.
        output_format: Output format name.
        output: Output path, None for standard output.
        bits: Whether nats-valued quantities are displayed in bits.
        config_text: Verbatim text of an explicit configuration file.
    """

    command: str
    parameters: dict[str, Any] = field(default_factory=dict)
    envelope: EnvelopeConfig | None = None
    output_format: str = "plain"
    output: Path | None = None
    bits: bool = False
    config_text: str | None = None

    def to_dict(self) -> dict[str, Any]:
        """Plain-data form, without the worker count."""
        envelope = None
        if self.envelope is not None:
            envelope = asdict(self.envelope)
            envelope.pop("threads")
        return {
            "command": self.command,
            "parameters": dict(self.parameters),
            "envelope": envelope,
            "output_format": self.output_format,
            "output": None if self.output is None else str(self.output),
            "bits": self.bits,
            "config_text": self.config_text,
        }

    @property
    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
