"""
Configuration settings for DualGraphLens
"""

from pathlib import Path
from typing import Any

from pydantic import ConfigDict, Field, field_validator
from pydantic_settings import BaseSettings

PACKAGED_FIXTURES = Path(__file__).parent.parent / "data" / "fixtures"


class Settings(BaseSettings):
    # App settings
    DEBUG: bool = False
    PROJECT_NAME: str = "DualGraphLens"
    VERSION: str = "1.0.0"

    # Fixture corpus; None means the packaged corpus
    FIXTURES_DIR: Path | None = None

    LOG_LEVEL: str = "WARNING"

    # Randomized subcommands and corpus-check
    DEFAULT_SEED: int = 20240611
    CORPUS_WORKERS: int = 4

    # Exact isomorphism search refuses anything bigger
    ISOMORPHISM_MAX_VERTICES: int = 64

    # HTTP surface
    RATE_LIMIT: str = "60/minute"
    ALLOWED_ORIGINS: str | list[str] = Field(
        default="http://localhost:5173,http://localhost:3000",
        description="Comma-separated list of allowed origins",
    )

    @field_validator("ALLOWED_ORIGINS")
    @classmethod
    def parse_cors(cls, v: Any) -> list[str]:
        if isinstance(v, str):
            return [origin.strip() for origin in v.split(",")]
        elif isinstance(v, list):
            return v
        return []

    @field_validator("LOG_LEVEL")
    @classmethod
    def upper_level(cls, v: str) -> str:
        return v.upper()

    def fixtures_path(self) -> Path:
        return self.FIXTURES_DIR if self.FIXTURES_DIR is not None else PACKAGED_FIXTURES

    model_config = ConfigDict(
        case_sensitive=True,
        env_file=".env",
        extra="ignore",
    )


# Create settings instance
settings = Settings()
