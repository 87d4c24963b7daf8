"""Tests for the command-line interface."""

import pytest
import yaml
from typer.testing import CliRunner

from anderson_lab.config.settings import settings
from anderson_lab.errors import ConfigError
from anderson_lab.interfaces.cli.main import (
    EXIT_CHECK,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    app,
    build_overrides,
    parse_eps,
)
from anderson_lab.storage.registry import RunRegistry

runner = CliRunner()


@pytest.fixture
def config_file(tmp_path, tiny_overrides):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(tiny_overrides), encoding="utf-8")
    return path


def invoke(command, config_file, tmp_path, *extra):
    args = [command, "--config", str(config_file), "--out", str(tmp_path / "runs"), *extra]
    return runner.invoke(app, args)


class TestParsing:
    """Tests for flag parsing."""

    def test_parse_eps(self):
        """Test repeated and comma-separated values flatten in order."""
        assert parse_eps(["0.25,0.125", "0.0625"]) == [0.25, 0.125, 0.0625]
        assert parse_eps(None) is None

    def test_parse_eps_rejects_text(self):
        """Test a non-number is a configuration error."""
        with pytest.raises(ConfigError, match="abc"):
            parse_eps(["abc"])

    def test_build_overrides(self):
        """Test only given flags become overrides."""
        overrides = build_overrides(5, ["0.5"], 3, None, True)

        assert overrides == {
            "torus": {"dim": 3},
            "noise": {"seed": 5, "eps": [0.5]},
            "allow_out_of_range_exponents": True,
        }
        assert build_overrides(None, None, None, None, False) == {}


class TestCommands:
    """Tests for command exit codes and output."""

    def test_check_passes(self, isolated_settings, config_file, tmp_path):
        """Test the zero-noise check exits 0 and registers the run."""
        result = invoke("check", config_file, tmp_path)

        assert result.exit_code == 0, result.output
        assert "completed" in result.output
        rows = RunRegistry().list_runs()
        assert [row.command for row in rows] == ["check"]

    def test_bad_eps(self, isolated_settings, config_file, tmp_path):
        """Test an unparsable --eps exits 2."""
        result = invoke("noise", config_file, tmp_path, "--eps", "abc")

        assert result.exit_code == EXIT_CONFIG

    def test_bad_dim(self, isolated_settings, config_file, tmp_path):
        """Test an invalid dimension exits 2."""
        result = invoke("noise", config_file, tmp_path, "--dim", "5")

        assert result.exit_code == EXIT_CONFIG
        assert "Invalid configuration" in result.output

    def test_failed_check(self, isolated_settings, config_file, tmp_path, monkeypatch):
        """Test a failing invariant exits 4."""
        monkeypatch.setattr("anderson_lab.flows.check_flow.BONY_TOL", -1.0)

        result = invoke("check", config_file, tmp_path)

        assert result.exit_code == EXIT_CHECK

    def test_row_limit(self, isolated_settings, config_file, tmp_path, monkeypatch):
        """Test a lattice above the matrix row limit exits 3."""
        monkeypatch.setattr(settings, "max_matrix_rows", 10)

        result = invoke("operator", config_file, tmp_path)

        assert result.exit_code == EXIT_NUMERICAL
        assert "Numerical failure" in result.output

    def test_runs(self, isolated_settings, config_file, tmp_path):
        """Test runs lists the registry and says so when it is empty."""
        empty = runner.invoke(app, ["runs"])
        assert "No runs registered" in empty.output

        invoke("noise", config_file, tmp_path)
        listed = runner.invoke(app, ["runs"])

        assert listed.exit_code == 0
        assert "noise" in listed.output
