"""
Experiment configuration loading.

Configs are TOML documents with the run keys at the top level and one table
per experiment block:

    experiment = "srs-mse"
    seed = 7
    drops = 200

    [srs_mse]
    inr_db = [0.0, 10.0]

Blocks that are missing get their defaults. Everything is validated by
models.experiment.ExperimentConfig before any experiment starts.
"""

import hashlib

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Union

import tomli_w
from pydantic import ValidationError

from common.errors import ConfigError
from common.logging import get_logger
from models.experiment import ExperimentConfig

logger = get_logger(__name__)


def _key_path(error: ValidationError) -> str:
    first = error.errors()[0]
    loc = [str(part) for part in first.get("loc", ())]
    return ".".join(loc) if loc else "<root>"


def _validate(data: Dict[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key_path = _key_path(e)
        logger.error("config_invalid", key_path=key_path, error=first["msg"], error_count=e.error_count())
        raise ConfigError(key_path, first["msg"]) from None


def parse_config(
    text: str,
    experiment: Optional[str] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Parse and validate a TOML experiment config.

    Args:
        text: TOML document
        experiment: Experiment selected on the command line. Fills a missing
            `experiment` key; a different value in the document is an error.
        defaults: Top-level values used when the document omits them
            (environment defaults such as seed and workers)

    Returns:
        Validated ExperimentConfig

    Raises:
        ConfigError: Malformed TOML, unknown key, wrong type or violated invariant.
            key_path names the first offending key.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError("<document>", f"invalid TOML: {e}") from None

    for key, value in (defaults or {}).items():
        data.setdefault(key, value)

    if experiment is not None:
        declared = data.setdefault("experiment", experiment)
        if declared != experiment:
            raise ConfigError(
                "experiment", f"config is for '{declared}' but '{experiment}' was requested"
            )
    return _validate(data)


def load_config_file(
    path: Union[str, Path],
    experiment: Optional[str] = None,
    defaults: Optional[Dict[str, Any]] = None,
) -> ExperimentConfig:
    """
    Read and parse a config file.

    Raises:
        ConfigError: File cannot be read or does not validate
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("--config", f"cannot read {path}: {e.strerror or e}") from None
    config = parse_config(text, experiment, defaults)
    logger.info("config_loaded", path=str(path), experiment=config.experiment)
    return config


def apply_overrides(config: ExperimentConfig, **overrides: Optional[int]) -> ExperimentConfig:
    """
    Return a copy with command-line overrides applied and re-validated.

    None values are ignored, so unset flags keep the config's values.
    """
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return config
    data = config.model_dump(mode="json", exclude_none=True)
    data.update(updates)
    return _validate(data)


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical TOML rendering; parse_config(serialize_config(c)) == c."""
    return tomli_w.dumps(config.model_dump(mode="json", exclude_none=True))


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 hex digest of the canonical TOML rendering."""
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()
