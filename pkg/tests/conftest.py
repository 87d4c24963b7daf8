"""Pytest configuration and fixtures."""

from typing import Any

import numpy as np
import pytest

from anderson_lab.config.loader import load_run_config
from anderson_lab.config.settings import settings
from anderson_lab.models.run import RunConfig
from anderson_lab.models.torus import TorusSpec
from anderson_lab.noise.enhance import EnhancedNoise2D, EnhancedNoise3D, enhance_2d, enhance_3d
from anderson_lab.noise.mollifiers import BUMP
from anderson_lab.operators.anderson2d import OperatorBundle2D, shift_and_bundle
from anderson_lab.operators.anderson3d import OperatorBundle3D, shift_and_bundle_3d
from anderson_lab.storage.registry import RunRegistry

NOISE_SEED = 7


@pytest.fixture
def spec2() -> TorusSpec:
    """2-d lattice small enough for dense matrices."""
    return TorusSpec(dim=2, K=8)


@pytest.fixture
def spec3() -> TorusSpec:
    """Smallest admissible 3-d lattice."""
    return TorusSpec(dim=3, K=4)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def noise2(spec2) -> EnhancedNoise2D:
    """White noise mollified at eps = 1/4; xi_eps lives on |k| < 4."""
    return enhance_2d(NOISE_SEED, 0.25, BUMP, spec2)


@pytest.fixture
def null_noise2(spec2) -> EnhancedNoise2D:
    """Zero noise with the eps = 1/4 renormalization constant."""
    return enhance_2d(NOISE_SEED, 0.25, BUMP, spec2, zero_noise=True)


@pytest.fixture
def bundle2(noise2) -> OperatorBundle2D:
    """Shifted 2-d operator at the top cutoff level."""
    return shift_and_bundle(noise2, N=3, calibration_samples=5, seed=NOISE_SEED)


@pytest.fixture
def null_bundle2(null_noise2) -> OperatorBundle2D:
    return shift_and_bundle(null_noise2, calibration_samples=5, seed=NOISE_SEED)


@pytest.fixture
def noise3(spec3) -> EnhancedNoise3D:
    """3-d noise at eps = 1/2; the printed c2 sum is cheap at this size."""
    return enhance_3d(NOISE_SEED, 0.5, BUMP, spec3)


@pytest.fixture
def null_noise3(spec3) -> EnhancedNoise3D:
    return enhance_3d(NOISE_SEED, 0.5, BUMP, spec3, zero_noise=True)


@pytest.fixture
def null_bundle3(null_noise3) -> OperatorBundle3D:
    return shift_and_bundle_3d(null_noise3, calibration_samples=3, seed=NOISE_SEED)


@pytest.fixture
def registry(tmp_path) -> RunRegistry:
    """Registry on a throwaway sqlite file."""
    return RunRegistry(f"sqlite:///{tmp_path / 'registry.db'}")


@pytest.fixture
def isolated_settings(tmp_path, monkeypatch):
    """Point the registry and the output root of the global settings into tmp_path."""
    monkeypatch.setattr(settings, "database_url", f"sqlite:///{tmp_path / 'cli.db'}")
    monkeypatch.setattr(settings, "output_root", tmp_path / "runs")
    return settings


@pytest.fixture
def tiny_overrides() -> dict[str, Any]:
    """Config overrides for flows that finish in seconds."""
    return {
        "torus": {"dim": 2, "K": 8},
        "noise": {"seed": 3, "eps": [0.25, 0.125], "zero_noise": True},
        "operator": {
            "calibration_samples": 4,
            "holdout_samples": 4,
            "probe_count": 2,
            "power_iterations": 20,
        },
        "evolution": {"T": 0.02, "dt": 0.001, "record_every": 5},
        "convergence": {
            "times": [0.01, 0.02],
            "allowed_inversions": 1,
            "order_dts": [0.004, 0.002, 0.001],
        },
        "check": {
            "bony_samples": 4,
            "d_oracle_samples": 2,
            "agreement_samples": 2,
            "symmetry_pairs": 2,
            "gamma_samples": 3,
            "inequality_samples": 3,
            "sweep_samples": 2,
            "order_dts": [0.0002, 0.0001, 0.00005],
        },
    }


@pytest.fixture
def tiny_config(tiny_overrides) -> RunConfig:
    return load_run_config(None, tiny_overrides)
