"""Run configuration loading: packaged defaults, YAML file, flag overrides."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import ValidationError

from ..errors import ConfigError
from ..models.run import RunConfig

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).with_name("defaults.yaml")


def _deep_merge(base: dict[str, Any], update: dict[str, Any]) -> dict[str, Any]:
    merged = dict(base)
    for key, value in update.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must be a mapping of sections")
    return data


def load_run_config(
    path: Optional[Path] = None,
    overrides: Optional[dict[str, Any]] = None,
) -> RunConfig:
    """Build a validated RunConfig.

    Args:
        path: Optional YAML file merged over the packaged defaults
        overrides: Nested dict applied last (typically from CLI flags)

    Returns:
        Validated run configuration

    Raises:
        ConfigError: If a file cannot be parsed or validation fails
    """
    data = _read_yaml(DEFAULTS_PATH)
    if path is not None:
        data = _deep_merge(data, _read_yaml(path))
    if overrides:
        data = _deep_merge(data, overrides)
    if overrides and "K" in overrides.get("torus", {}) and "grid_n" not in overrides["torus"]:
        data["torus"]["grid_n"] = None
    try:
        config = RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
    logger.debug(f"Loaded config with hash {config_hash(config)}")
    return config


def config_hash(config: RunConfig) -> str:
    """Content hash of a configuration (first 16 hex digits of SHA-256)."""
    payload = json.dumps(config.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def run_hash(config: RunConfig, command: str) -> str:
    """Hash naming the run directory: the command together with its configuration."""
    payload = json.dumps(
        {"command": command, "config": config.model_dump(mode="json")}, sort_keys=True
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]
