"""
Logging utilities for mimolab.

Logging Levels:
    - DEBUG: Kernel-level detail (basis selections, coefficient counts)
    - INFO: Experiment lifecycle, drop progress, output files
    - WARNING: Degenerate inputs that were tolerated
    - ERROR: Failed runs
"""

import logging
import sys

import structlog


# Third-party loggers kept at WARNING unless DEBUG is requested
QUIET_LOGGERS = [
    "numexpr",
    "concurrent.futures",
]


def configure_logging(level: str = "INFO", fmt: str = "console") -> None:
    """
    Configure logging for the application.

    Log output goes to stderr so CSV written to stdout stays machine readable.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR)
        fmt: "console" for colored key-value lines, "json" for one JSON object per line
    """
    log_level = getattr(logging, level.upper(), logging.INFO)

    # Configure root logger
    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )

    quiet_level = log_level if log_level == logging.DEBUG else logging.WARNING
    for logger_name in QUIET_LOGGERS:
        logging.getLogger(logger_name).setLevel(quiet_level)

    if fmt == "json":
        renderer = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer(colors=sys.stderr.isatty())

    structlog.configure(
        processors=[
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="%Y-%m-%d %H:%M:%S"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(log_level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> structlog.BoundLogger:
    """
    Get a structured logger.

    Args:
        name: Logger name (typically __name__)

    Returns:
        Structured logger instance
    """
    return structlog.get_logger(name)
