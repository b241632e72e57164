"""Configuration Module

Process-wide settings read from the environment (and an optional ``.env`` file).
"""

import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

ENV_PREFIX = "GRAPHTEST_"


class Settings(BaseModel):
    """Runtime settings shared by the CLI and the orchestrator."""

    workers: int = Field(default=4, ge=1)
    log_level: str = "INFO"
    permutations: int = Field(default=1000, ge=1)
    chunk_size: int = Field(default=250, ge=1)
    output_dir: Path = Path("results")

    @field_validator("log_level")
    @classmethod
    def _upper_level(cls, value: str) -> str:
        level = value.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level: {value}")
        return level

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        """Build settings from ``GRAPHTEST_*`` environment variables.

        Args:
            dotenv_path: Optional explicit ``.env`` file; by default the usual
                search from the working directory is used.

        Returns:
            Settings instance
        """
        load_dotenv(dotenv_path)
        values = {}
        for field in cls.model_fields:
            raw = os.getenv(f"{ENV_PREFIX}{field.upper()}")
            if raw is not None and raw != "":
                values[field] = raw
        settings = cls(**values)
        logger.debug(f"Loaded settings: {settings.model_dump()}")
        return settings
