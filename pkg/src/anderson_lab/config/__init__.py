"""Configuration module."""

from .loader import DEFAULTS_PATH, config_hash, load_run_config, run_hash
from .settings import Settings, get_settings, settings

__all__ = [
    "DEFAULTS_PATH",
    "Settings",
    "config_hash",
    "get_settings",
    "load_run_config",
    "run_hash",
    "settings",
]
