"""
Configuration management for mimolab.

Process-level settings are loaded from environment variables (a .env file is
honoured). Experiment parameters live in TOML files, see services.config_loader.
"""

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from common.errors import ConfigError

# Load environment variables
load_dotenv()


@dataclass
class Config:
    """Application configuration - values from environment with defaults."""

    log_level: str
    log_format: str
    workers: int
    default_seed: int


def _env(key: str, default: str) -> str:
    """Get environment variable or its default."""
    value = os.getenv(key)
    if value is None or value.strip() == "":
        return default
    return value.strip()


def _env_int(key: str, default: int, minimum: Optional[int] = None) -> int:
    """Get integer environment variable."""
    raw = _env(key, str(default))
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None
    if minimum is not None and value < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {value}")
    return value


def _env_choice(key: str, default: str, choices: tuple) -> str:
    """Get environment variable restricted to a set of values."""
    value = _env(key, default).lower()
    if value not in choices:
        raise ConfigError(key, f"expected one of {', '.join(choices)}, got {value!r}")
    return value


def load_config() -> Config:
    """
    Load configuration from environment variables.

    Environment variables:
        - LOG_LEVEL: Logging level (default INFO)
        - LOG_FORMAT: "console" or "json" (default console)
        - SIM_WORKERS: Parallel drop workers (default 1)
        - SIM_DEFAULT_SEED: Master seed when neither config nor CLI sets one (default 0)

    Returns:
        Config object

    Raises:
        ConfigError: If a variable is set to an invalid value
    """
    return Config(
        log_level=_env("LOG_LEVEL", "INFO").upper(),
        log_format=_env_choice("LOG_FORMAT", "console", ("console", "json")),
        workers=_env_int("SIM_WORKERS", 1, minimum=1),
        default_seed=_env_int("SIM_DEFAULT_SEED", 0, minimum=0),
    )


def get_config() -> Config:
    """Get the application configuration."""
    return load_config()
