"""Tests for settings, run configuration loading and hashing."""

import pytest

from anderson_lab.config.loader import config_hash, load_run_config, run_hash
from anderson_lab.config.settings import Settings
from anderson_lab.errors import ConfigError
from anderson_lab.models.evolution import EquationKind
from anderson_lab.models.noise import C2Variant
from anderson_lab.models.run import DEFAULT_EXPONENTS, RunConfig


class TestSettings:
    """Tests for environment settings."""

    def test_env_prefix(self, monkeypatch):
        """Test ANDERSON_LAB_ variables override the defaults."""
        monkeypatch.setenv("ANDERSON_LAB_MAX_MATRIX_ROWS", "123")
        monkeypatch.setenv("ANDERSON_LAB_LOG_LEVEL", "DEBUG")

        loaded = Settings()

        assert loaded.max_matrix_rows == 123
        assert loaded.log_level == "DEBUG"


class TestLoadRunConfig:
    """Tests for the layered config loader."""

    def test_defaults(self):
        """Test the packaged defaults validate."""
        config = load_run_config()

        assert config.torus.dim == 2
        assert config.torus.K == 16
        assert config.noise.eps == [0.25, 0.125, 0.0625]
        assert config.noise.c2_variant is C2Variant.PRINTED
        assert config.alpha == DEFAULT_EXPONENTS[2]["alpha"]

    def test_check_sizes(self):
        """Test the check command defaults to the acceptance oracle sizes."""
        check = load_run_config().check

        assert (check.bony_samples, check.d_oracle_samples, check.agreement_samples) == (
            200,
            50,
            20,
        )
        assert check.renorm_eps[-1] == pytest.approx(2.0**-7)
        assert check.order_dts == [0.001, 0.0005, 0.00025]

    def test_file_then_overrides(self, tmp_path):
        """Test a YAML file is merged over the defaults and overrides come last."""
        path = tmp_path / "run.yaml"
        path.write_text("noise:\n  seed: 9\nevolution:\n  equation: wave\n", encoding="utf-8")

        config = load_run_config(path, {"noise": {"seed": 11}})

        assert config.noise.seed == 11
        assert config.noise.mollifier == "bump"
        assert config.evolution.equation is EquationKind.WAVE

    def test_K_override_resets_grid(self):
        """Test overriding K recomputes the grid size."""
        config = load_run_config(None, {"torus": {"K": 8}})

        assert config.torus.K == 8
        assert config.torus.grid_n == 26

    def test_3d_exponent_defaults(self):
        """Test a 3-d run takes the 3-d exponents."""
        config = load_run_config(None, {"torus": {"dim": 3, "K": 4}})

        assert config.alpha == DEFAULT_EXPONENTS[3]["alpha"]
        assert config.gamma == DEFAULT_EXPONENTS[3]["gamma"]

    def test_unreadable_yaml(self, tmp_path):
        """Test a malformed file is a configuration error."""
        path = tmp_path / "bad.yaml"
        path.write_text("noise: [unclosed\n", encoding="utf-8")

        with pytest.raises(ConfigError, match="Cannot read"):
            load_run_config(path)

    def test_not_a_mapping(self, tmp_path):
        """Test a file must hold sections."""
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")

        with pytest.raises(ConfigError, match="mapping"):
            load_run_config(path)

    @pytest.mark.parametrize(
        "overrides",
        [
            {"noise": {"eps": []}},
            {"noise": {"eps": [0.25, -0.1]}},
            {"torus": {"dim": 5}},
            {"operator": {"target_contraction": 1.5}},
            {"evolution": {"T": 0.001, "dt": 0.01}},
            {"output": {"snapshot_format": "hdf5"}},
            {"check": {"renorm_eps": [0.25, 0.125]}},
            {"check": {"renorm_eps": [2.0, 0.5, 0.25]}},
            {"check": {"order_dts": [0.001]}},
        ],
    )
    def test_invalid_values(self, overrides):
        """Test validation failures surface as configuration errors."""
        with pytest.raises(ConfigError):
            load_run_config(None, overrides)


class TestExponentWindows:
    """Tests for the admissible exponent windows."""

    def test_out_of_range_alpha(self):
        """Test an alpha outside (-4/3, -1) is rejected in 2-d."""
        with pytest.raises(ConfigError, match="allow-out-of-range-exponents"):
            load_run_config(None, {"exponents": {"alpha": -0.5}})

    def test_allowed_out_of_range(self):
        """Test the override flag accepts any exponent."""
        config = load_run_config(
            None, {"exponents": {"alpha": -0.5}, "allow_out_of_range_exponents": True}
        )

        assert config.alpha == -0.5

    def test_window_is_open(self):
        """Test the window endpoints themselves are excluded."""
        with pytest.raises(ConfigError):
            load_run_config(None, {"exponents": {"gamma": 1.0}})


class TestHashes:
    """Tests for config and run hashes."""

    def test_stable(self, tiny_overrides):
        """Test equal configurations hash equally."""
        a = load_run_config(None, tiny_overrides)
        b = load_run_config(None, tiny_overrides)

        assert config_hash(a) == config_hash(b)
        assert len(config_hash(a)) == 16

    def test_config_changes_hash(self, tiny_config):
        """Test any config change moves the hash."""
        other = tiny_config.model_copy(update={"allow_out_of_range_exponents": True})

        assert config_hash(other) != config_hash(tiny_config)

    def test_command_changes_run_hash(self, tiny_config):
        """Test the same config under two commands names two run directories."""
        assert run_hash(tiny_config, "noise") != run_hash(tiny_config, "check")
        assert run_hash(tiny_config, "solve") != run_hash(tiny_config, "solve-order-test")

    def test_round_trip_through_json(self, tiny_config):
        """Test a dumped config validates back to the same hash."""
        again = RunConfig.model_validate(tiny_config.model_dump(mode="json"))

        assert config_hash(again) == config_hash(tiny_config)
