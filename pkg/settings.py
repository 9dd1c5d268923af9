"""
Workbench Settings
Loads caps, budgets and worker counts from config.json with environment overrides.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from sympy import isprime

from errors import ConfigError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

ENV_PREFIX = "WORKBENCH_"
DEFAULT_CONFIG_PATH = "config.json"


class WorkbenchSettings(BaseModel):
    """Validated knobs shared by every module."""

    default_cap: int = Field(12, ge=1)
    extended_cap: int = Field(16, ge=1)
    oracle_max_cap: int = Field(12, ge=1)
    proxy_primes: List[int] = Field(default_factory=lambda: [3, 5, 7])
    workers: int = Field(4, ge=1)
    brute_force_budget: int = Field(2**18, ge=1)
    lift_node_budget: int = Field(200000, ge=1)
    square_zero_budget: int = Field(2**16, ge=1)
    enumeration_node_budget: int = Field(200000, ge=1)
    log_level: str = "INFO"

    model_config = ConfigDict(
        extra="ignore",
        json_schema_extra={
            "example": {
                "default_cap": 12,
                "extended_cap": 16,
                "proxy_primes": [3, 5, 7],
                "workers": 4,
            }
        },
    )

    @field_validator("proxy_primes")
    @classmethod
    def _primes_only(cls, value: List[int]) -> List[int]:
        bad = [p for p in value if not isprime(p)]
        if bad:
            raise ValueError(f"proxy_primes must be primes, got {bad}")
        return value

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"unknown log level {value}")
        return value


def _env_overrides() -> Dict[str, Any]:
    overrides: Dict[str, Any] = {}
    for name in WorkbenchSettings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is None:
            continue
        if name == "proxy_primes":
            overrides[name] = [int(p) for p in raw.split(",") if p.strip()]
        else:
            overrides[name] = raw
    return overrides


def load_settings(path: Optional[str] = None, **overrides: Any) -> WorkbenchSettings:
    """
    Build settings from defaults, the config file, environment and explicit overrides.

    Args:
        path: JSON config file; defaults to $WORKBENCH_CONFIG or config.json
        overrides: highest-priority values (CLI flags)

    Returns:
        Validated settings

    Raises:
        ConfigError: If a value fails validation
    """
    path = path or os.getenv(ENV_PREFIX + "CONFIG", DEFAULT_CONFIG_PATH)
    data: Dict[str, Any] = {}
    if os.path.exists(path):
        try:
            with open(path, "r") as f:
                data = json.load(f).get("workbench", {})
        except Exception as e:
            logger.warning(f"Could not load {path}: {e}")
    try:
        data.update(_env_overrides())
    except ValueError as e:
        raise ConfigError(f"Invalid environment override: {e}")
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return WorkbenchSettings(**data)
    except ValidationError as e:
        raise ConfigError(f"Invalid settings: {e}")


_settings: Optional[WorkbenchSettings] = None


def get_settings() -> WorkbenchSettings:
    """Get or create the process-wide settings instance."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def set_settings(settings: WorkbenchSettings) -> None:
    global _settings
    _settings = settings


def reset_settings() -> None:
    global _settings
    _settings = None
