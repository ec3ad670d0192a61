"""
Settings (env-driven, Pydantic v2)
==================================
Every knob can be overridden with a ``COFLOW_`` environment variable or a
``.env`` file in the working directory.
"""

import logging
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Experiment defaults
    default_trials: int = Field(100, ge=1)
    workers: int = Field(1, ge=1)              # process pool size for trials
    csv_precision: int = Field(6, ge=1)        # decimal places in CSV output

    # Oracle
    oracle_max_states: int = Field(2_000_000, ge=1)

    # Workload
    speed_grid: int = Field(64, ge=1)          # speeds snap to multiples of 1/speed_grid

    model_config = SettingsConfigDict(
        env_prefix="COFLOW_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()


def configure_logging(level: str | None = None) -> None:
    """Root logger setup, called once by the CLI."""
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format=LOG_FORMAT,
    )
