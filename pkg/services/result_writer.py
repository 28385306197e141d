"""
CSV output for result tables, burst logs and channel dumps.

A result file is a metadata block of `# key=value` lines followed by a plain
CSV body (header row, comma separated, `.` decimal separator):

    # experiment=power-ratio
    # seed=0
    # config_hash=3f1c...
    # tool_version=0.1.0
    drop,basis,k,power_ratio
    0,dft,10,0.41...

Files are written to a temporary sibling and renamed into place, so a failed
run never leaves a partial CSV behind.
"""

import io
import os
import sys
import tempfile
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import pandas as pd
from pydantic import ValidationError

from common.errors import OutputError
from common.logging import get_logger
from models.channel import ChannelSnapshot
from models.evaluation import BurstRecord
from models.experiment import ResultTable
from phy.channel import snapshot_table

logger = get_logger(__name__)

METADATA_KEYS = ("experiment", "seed", "config_hash", "tool_version")

BURST_COLUMNS = ("size_bits", "duration_s")


def table_frame(table: ResultTable) -> pd.DataFrame:
    """Rows as a DataFrame with the schema's column order."""
    return pd.DataFrame(list(table.rows), columns=list(table.header))


def render_table(table: ResultTable) -> str:
    """Metadata lines plus CSV body as one string."""
    keys = [k for k in METADATA_KEYS if k in table.metadata]
    keys += sorted(k for k in table.metadata if k not in METADATA_KEYS)
    lines = [f"# {k}={table.metadata[k]}" for k in keys]
    body = table_frame(table).to_csv(index=False, lineterminator="\n")
    return "".join(line + "\n" for line in lines) + body


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def write_table(table: ResultTable, path: Optional[Union[str, Path]] = None) -> None:
    """
    Write a result table to `path`, or to stdout when path is None or "-".

    Raises:
        OutputError: The file cannot be written
    """
    text = render_table(table)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(path)
    try:
        _atomic_write(path, text)
    except OSError as e:
        logger.error("table_write_failed", path=str(path), error=str(e), error_type=type(e).__name__)
        raise OutputError(str(path), f"cannot write results: {e.strerror or e}", cause=e) from e
    logger.info("table_written", path=str(path), experiment=table.experiment, rows=len(table.rows))


def read_table(path: Union[str, Path]) -> Tuple[Dict[str, str], pd.DataFrame]:
    """
    Read a result file back into (metadata, rows).

    Raises:
        OutputError: The file cannot be read
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OutputError(str(path), f"cannot read results: {e.strerror or e}", cause=e) from e
    metadata: Dict[str, str] = {}
    body: List[str] = []
    for line in text.splitlines(keepends=True):
        if line.startswith("# ") and not body:
            key, _, value = line[2:].rstrip("\n").partition("=")
            metadata[key] = value
        else:
            body.append(line)
    return metadata, pd.read_csv(io.StringIO("".join(body)))


def read_bursts(path: Union[str, Path]) -> List[BurstRecord]:
    """
    Load a burst log with columns size_bits, duration_s.

    Raises:
        OutputError: Missing file, missing columns or invalid values
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, comment="#")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise OutputError(str(path), f"cannot read bursts: {e}", cause=e) from e
    missing = [c for c in BURST_COLUMNS if c not in frame.columns]
    if missing:
        raise OutputError(str(path), f"missing columns: {', '.join(missing)}")
    try:
        bursts = [
            BurstRecord(size_bits=float(size), duration_s=float(duration))
            for size, duration in zip(frame["size_bits"], frame["duration_s"])
        ]
    except (ValidationError, ValueError) as e:
        raise OutputError(str(path), f"invalid burst record: {e}", cause=e) from e
    logger.info("bursts_loaded", path=str(path), bursts=len(bursts))
    return bursts


def write_snapshot(snapshot: ChannelSnapshot, path: Union[str, Path]) -> None:
    """
    Dump a channel snapshot as {port, unit, re, im} rows.

    Raises:
        OutputError: The file cannot be written
    """
    path = Path(path)
    text = snapshot_table(snapshot).to_csv(index=False, lineterminator="\n", float_format="%.17g")
    try:
        _atomic_write(path, text)
    except OSError as e:
        raise OutputError(str(path), f"cannot write snapshot: {e.strerror or e}", cause=e) from e
    logger.debug("snapshot_written", path=str(path), ports=snapshot.ports, units=snapshot.units)
