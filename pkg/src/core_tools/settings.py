"""
Process settings read from the environment (prefix HARTREE_LAB_) and .env files.
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LabSettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="HARTREE_LAB_", env_file=".env", extra="ignore")

    seed: int = Field(default=20240601, ge=0)
    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path("runs")
    enumeration_budget: int = Field(default=10**9, gt=0)
    use_colors: bool = True

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in {"DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"unknown log level {value!r}")
        return value


@lru_cache(maxsize=1)
def get_settings() -> LabSettings:
    return LabSettings()
