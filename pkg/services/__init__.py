"""
Service layer for mimolab.

This package contains:
- Experiment config parsing and canonical serialization (TOML)
- Per-drop seed derivation
- Result, burst-log and snapshot CSV I/O
- Precoder report text codec
"""

from .config_loader import (
    apply_overrides,
    config_hash,
    load_config_file,
    parse_config,
    serialize_config,
)
from .seeding import derive_seed, drop_rng
from .result_writer import read_bursts, read_table, render_table, write_snapshot, write_table
from .report_format import parse_report, read_report, serialize_report, write_report

__all__ = [
    # Config
    "parse_config",
    "load_config_file",
    "apply_overrides",
    "serialize_config",
    "config_hash",
    # Seeds
    "derive_seed",
    "drop_rng",
    # CSV
    "render_table",
    "write_table",
    "read_table",
    "read_bursts",
    "write_snapshot",
    # Reports
    "serialize_report",
    "parse_report",
    "write_report",
    "read_report",
]
