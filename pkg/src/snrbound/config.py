"""Central configuration loaded from environment variables and YAML presets."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import yaml
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from snrbound.models import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_LAMBDA_POINTS,
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
)

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent.parent
CONFIG_DIR = PROJECT_ROOT / "config"
FIGURES_DIR = CONFIG_DIR / "figures"


def _resolve_env_file() -> str | None:
    """Return .env path only if it exists and is readable (not git-crypt encrypted)."""
    env_path = PROJECT_ROOT / ".env"
    if not env_path.exists():
        return None
    try:
        with open(env_path, "rb") as f:
            header = f.read(10)
        if header.startswith(b"\x00GITCRYPT"):
            logger.debug(".env is git-crypt encrypted, using env vars only")
            return None
        return str(env_path)
    except OSError:
        return None


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="SNRBOUND_",
        env_file=_resolve_env_file(),
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Monte Carlo
    default_seed: int = DEFAULT_SEED
    replicates: int = Field(default=DEFAULT_REPLICATES, ge=1)
    chunk_size: int = Field(default=DEFAULT_CHUNK_SIZE, ge=1)
    max_workers: int = Field(default=4, ge=1)
    lambda_points: int = Field(default=DEFAULT_LAMBDA_POINTS, ge=2)
    se_multiplier: float = Field(default=4.0, gt=0)

    # Quadrature / grids
    quadrature_nodes: int = Field(default=128, ge=8)
    grid_slack: float = Field(default=1e-12, ge=0)

    # Logging
    log_level: str = "INFO"

    # Paths
    output_dir: Path = Field(default_factory=lambda: PROJECT_ROOT / "output")


def load_figure_config(slug: str) -> dict[str, Any]:
    """Load a figure preset YAML by slug name."""
    path = FIGURES_DIR / f"{slug}.yaml"
    if not path.exists():
        raise FileNotFoundError(f"Figure config not found: {path}")
    with open(path) as f:
        data: dict[str, Any] = yaml.safe_load(f)
    data.setdefault("slug", slug)
    return data


def load_all_figure_configs() -> dict[str, dict[str, Any]]:
    """Load all figure presets from the figures directory, in slug order."""
    configs: dict[str, dict[str, Any]] = {}
    if not FIGURES_DIR.exists():
        return configs
    for path in sorted(FIGURES_DIR.glob("*.yaml")):
        slug = path.stem
        with open(path) as f:
            data = yaml.safe_load(f)
        data.setdefault("slug", slug)
        configs[slug] = data
    return configs


settings = Settings()
