"""Application settings loaded from environment variables."""

from functools import lru_cache
from pathlib import Path

from dotenv import find_dotenv
from pydantic_settings import BaseSettings

# Find .env file by searching up from current working directory
_ENV_FILE = find_dotenv(usecwd=True)


class Settings(BaseSettings):
    """Application settings loaded from environment variables.

    Every field can be overridden with an ``ANDERSON_LAB_``-prefixed variable,
    e.g. ``ANDERSON_LAB_OUTPUT_ROOT=/scratch/runs``.
    """

    # Artifacts
    output_root: Path = Path("runs")

    # Run registry
    database_url: str = "sqlite:///./anderson_lab.db"

    # Execution
    default_workers: int = 1
    fft_workers: int = 1

    # Memory and cost guards
    max_matrix_rows: int = 10_000
    max_c2_pairs: int = 50_000_000

    # Logging
    log_level: str = "INFO"

    model_config = {
        "env_file": _ENV_FILE if _ENV_FILE else None,
        "env_file_encoding": "utf-8",
        "env_prefix": "ANDERSON_LAB_",
        "extra": "ignore",
    }


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
