"""Tests for the module config."""
from dataclasses import replace
from pathlib import Path
from unittest.mock import patch

import pytest
from keyrate.config import Config
from keyrate.envelope import EnvelopeConfig
from keyrate.exceptions import GridError


def test_load_valid_toml_file(valid_config_path):
    """Test that a valid config file loads correctly."""
    config = Config()
    config._load_toml_file(str(valid_config_path))
    assert config.threads == 2
    assert config.bits is True
    assert config.bisect_tol == 0.002
    assert config.sweep_step == 0.05
    assert config.output_format == "json"
    assert config.envelope == EnvelopeConfig(
        grid_n=81, sup_norm_tol=1e-7, max_passes=100, threads=2
    )
    assert config.config_file == valid_config_path


def test_load_invalid_toml_file(caplog, invalid_config_path):
    """Test that an invalid config file logs a warning."""
    config = Config()
    config._load_toml_file(str(invalid_config_path))
    assert "Option foo in tool.keyrate not supported." in caplog.text


def test_load_invalid_envelope_key(invalid_envelope_config_path):
    """Test that an unknown envelope key raises an exception."""
    config = Config()
    with pytest.raises(AttributeError, match="Section envelope: config only accepts"):
        config._load_toml_file(str(invalid_envelope_config_path))


@patch("keyrate.config.open")
def test_load_invalid_envelope_value(mock_open):
    """Test that an invalid grid in the config file raises an exception."""
    config = Config()
    with patch("keyrate.config.tomllib.load") as mock_load:
        mock_load.return_value = {"tool": {"keyrate": {"envelope": {"grid_n": 80}}}}
        with pytest.raises(GridError, match="odd"):
            config._load_toml_file("foo")


def test_get_config_file():
    """Test that the config file is found in the current directory."""
    directory = Path(__file__).parent / "resources"
    config = Config()
    config_file = config.get_config_file(directory)
    assert config_file == directory / "pyproject.toml"


def test_get_parent_config_file():
    """Test that the config file is found in the parent directory."""
    directory = Path(__file__).parent / "resources" / "sub_dir"
    config = Config()
    config_file = config.get_config_file(directory)
    assert config_file == directory.parent / "pyproject.toml"


def test_load_explicit_file_is_echoed(valid_config_path):
    """Test that an explicit config file is kept verbatim."""
    config = Config()
    config.load(valid_config_path)
    assert config.config_text == valid_config_path.read_text(encoding="utf-8")


def test_load_discovered_file_is_not_echoed(monkeypatch, valid_config_path):
    """Test that a discovered pyproject.toml is loaded but not echoed."""
    monkeypatch.chdir(valid_config_path.parent)
    config = Config()
    config.load()
    assert config.config_file == valid_config_path.parent / "pyproject.toml"
    assert config.config_text is None
    assert config.envelope.grid_n == 81


def test_config_overload(valid_config_path):
    """Test overloading of config values."""
    config = Config()
    config._load_toml_file(str(valid_config_path))
    config.overload({"grid_n": 41, "threads": 3, "bits": False})
    assert config.envelope == replace(
        EnvelopeConfig(grid_n=41, sup_norm_tol=1e-7, max_passes=100), threads=3
    )
    assert config.threads == 3
    assert config.bits is False


def test_config_overload_invalid(default_config):
    """Test that overloading an invalid grid raises an exception."""
    with pytest.raises(GridError):
        default_config.overload({"grid_n": 40})


def test_default_threads(default_config):
    """Test that the default worker count is positive."""
    assert default_config.threads >= 1
