"""Test configuration."""

import math
from dataclasses import replace
from pathlib import Path

import numpy as np
from keyrate.config import Config
from keyrate.core import JointDist, ParamFamily, binary_symmetric_source
from keyrate.envelope import EnvelopeConfig
from keyrate.formatters import Matrix, Report, Table
from keyrate.run_config import RunConfig
from pytest import fixture

RESOURCES = Path(__file__).parent / "resources"

# Configuration


@fixture()
def default_config() -> Config:
    """Return a default Config object."""
    return Config()


@fixture
def valid_config_path() -> Path:
    """Return the path of the configuration."""
    return RESOURCES / "pyproject.toml"


@fixture
def invalid_config_path() -> Path:
    """Return the path of a configuration with an unknown option."""
    return RESOURCES / "invalid_pyproject.toml"


@fixture
def invalid_envelope_config_path() -> Path:
    """Return the path of a configuration with an unknown envelope key."""
    return RESOURCES / "invalid_envelope.toml"


@fixture
def fast_cfg() -> EnvelopeConfig:
    """Envelope settings small enough for unit tests."""
    return EnvelopeConfig(grid_n=41, sup_norm_tol=1e-8, max_passes=500)


@fixture
def medium_cfg() -> EnvelopeConfig:
    """Envelope settings with nodes at every multiple of 0.01."""
    return EnvelopeConfig(grid_n=101, sup_norm_tol=1e-8, max_passes=500)


# Distributions


@fixture
def bss_path() -> Path:
    """Return the path of a BSS(0.11) file."""
    return RESOURCES / "bss.json"


@fixture
def independent_path() -> Path:
    """Return the path of a product distribution file."""
    return RESOURCES / "independent.json"


@fixture
def erasure_path() -> Path:
    """Return the path of an erasure source with epsilon 0.2."""
    return RESOURCES / "erasure.json"


@fixture
def malformed_path() -> Path:
    """Return the path of a file with a JSON syntax error."""
    return RESOURCES / "malformed.json"


@fixture
def bss() -> JointDist:
    """BSS(0.11)."""
    return binary_symmetric_source(0.11)


@fixture
def bss_family() -> ParamFamily:
    """BSC-kernel chart around BSS(0.11)."""
    return ParamFamily.bsc_kernel(0.11)


@fixture
def skewed_family() -> ParamFamily:
    """BSC-kernel chart around a fully supported non-symmetric source."""
    return ParamFamily.bsc_kernel(0.11, (0.3, 0.3))


@fixture
def support_three_family() -> ParamFamily:
    """Chart of a source with Q(0, 0) = 0."""
    return ParamFamily.support_three((0.5, 0.5))


# Formatters


@fixture
def run_config() -> RunConfig:
    """Description of an envelope run."""
    return RunConfig(
        command="envelope",
        parameters={"variant": "bsc-kernel", "epsilon": 0.11, "rounds": math.inf},
        envelope=EnvelopeConfig(grid_n=41),
    )


@fixture
def bits_run_config(run_config: RunConfig) -> RunConfig:
    """The same run, displayed in bits."""
    return replace(run_config, bits=True)


@fixture
def report() -> Report:
    """A report with scalars, a table and a grid."""
    return Report(
        title="Example",
        values={
            "info": 0.5,
            "count": 3,
            "flag": True,
            "pair": (0.1, 0.2),
            "unbounded": math.inf,
            "wall_time": 1.0,
        },
        nats=frozenset({"info", "pair", "unbounded", "S", "R"}),
        volatile=frozenset({"wall_time"}),
        table=Table(("S", "R", "s"), [(0.0, 0.0, 1.0), (0.5, 0.25, 0.5)]),
        matrices={
            "field": Matrix(
                np.array([0.0, 0.5, 1.0]),
                np.array([[-math.inf, 0.0, 1.0], [0.0, 1.0, 2.0], [1.0, 2.0, 2.0]]),
            )
        },
    )


@fixture
def scalar_report() -> Report:
    """A report with scalars only."""
    return Report(title="Scalars", values={"info": 0.5, "count": 3})
