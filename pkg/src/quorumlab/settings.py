"""
Process-wide settings.

Values come from the environment (``QUORUMLAB_*``) or an optional ``.env``
file next to the working directory.
"""

from functools import lru_cache
from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class QuorumlabSettings(BaseSettings):
    """Defaults for the CLI and the library's size caps."""

    model_config = SettingsConfigDict(
        env_prefix="QUORUMLAB_",
        env_file=".env",
        extra="ignore",
    )

    log_level: str = "WARNING"
    out_dir: Path = Path("data/runs")
    oracle_limit: int = 8
    admissibility_server_cap: int = 16
    default_budget: int = 10_000
    max_delay: int = 6


@lru_cache(maxsize=1)
def get_settings() -> QuorumlabSettings:
    """Return the cached settings instance."""
    return QuorumlabSettings()
