"""
Exception hierarchy for mimolab.

The CLI maps ConfigError to exit code 1 and every other MimoLabError to exit code 2.
"""

from typing import Optional


class MimoLabError(Exception):
    """Base class for all library errors."""


class ConfigError(MimoLabError):
    """Invalid configuration. Carries the dotted path of the offending key."""

    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        self.message = message
        super().__init__(f"{key_path}: {message}")


class DimensionError(MimoLabError, ValueError):
    """Array shapes do not agree with the configured dimensions."""


class EmptyInputError(MimoLabError, ValueError):
    """An operation that needs at least one item received none."""


class DegenerateChannelError(MimoLabError, ValueError):
    """Zero-energy input where a ratio or decomposition is undefined."""


class CodebookError(MimoLabError, ValueError):
    """Codebook parameters or report contents are out of range."""


class ResourceError(MimoLabError, ValueError):
    """Reference-signal resources cannot be mapped (infeasible map, port overflow)."""


class OutputError(MimoLabError):
    """Writing or reading an artifact failed. Carries the file path."""

    def __init__(self, path: str, message: str, cause: Optional[BaseException] = None):
        self.path = path
        self.cause = cause
        super().__init__(f"{path}: {message}")
