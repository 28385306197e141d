"""
Line-oriented text codec for precoder reports.

Layout:

    # mimolab precoder report
    report kind=etype2 quantizer=amp8-psk16 basis=dft ports=8 ...
    block trp=0 layer=0 spatial=0;4 frequency=0;1 time=0 scale=0.5,-0.25
    0,0,0,1.0,0.0
    0,1,1,0.7079457843841379,0.0

One coefficient per line (trp, row, col, re, im). Floats are written with
repr, so parse_report(serialize_report(r)) == r bit-exactly.
"""

from pathlib import Path
from typing import Dict, List, Tuple, Union

from pydantic import ValidationError

from common.errors import CodebookError, OutputError
from common.logging import get_logger
from models.codebook import Coefficient, PrecoderReport, ReportBlock

logger = get_logger(__name__)

HEADER = "# mimolab precoder report"

_REPORT_KEYS = (
    "kind",
    "quantizer",
    "basis",
    "ports",
    "n_vertical",
    "freq_units",
    "slots",
    "trp_count",
    "layers",
)


def _indices(values) -> str:
    return ";".join(str(int(v)) for v in values)


def _complex(value: complex) -> str:
    return f"{float(value.real)!r},{float(value.imag)!r}"


def serialize_report(report: PrecoderReport) -> str:
    """Render a report in the text format (trailing newline included)."""
    lines = [
        HEADER,
        " ".join(
            [
                "report",
                f"kind={report.kind}",
                f"quantizer={report.quantizer_id}",
                f"basis={report.basis_kind}",
                f"ports={report.ports}",
                f"n_vertical={report.n_vertical}",
                f"freq_units={report.freq_units}",
                f"slots={report.slots}",
                f"trp_count={report.trp_count}",
                f"layers={report.layers}",
            ]
            + (
                [f"spatial_dimension={report.spatial_dimension}"]
                if report.spatial_dimension is not None
                else []
            )
        ),
    ]
    for block in report.blocks:
        lines.append(
            f"block trp={block.trp} layer={block.layer} "
            f"spatial={_indices(block.spatial_indices)} "
            f"frequency={_indices(block.frequency_indices)} "
            f"time={_indices(block.time_indices)} "
            f"scale={_complex(block.scale)}"
        )
        for c in block.coefficients:
            lines.append(f"{block.trp},{c.row},{c.col},{_complex(c.value)}")
    return "\n".join(lines) + "\n"


def _fields(line: str, lineno: int, keyword: str) -> Dict[str, str]:
    parts = line.split()
    if parts[0] != keyword:
        raise CodebookError(f"line {lineno}: expected '{keyword}' record")
    fields = {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise CodebookError(f"line {lineno}: malformed field '{part}'")
        fields[key] = value
    return fields


def _parse_indices(text: str, lineno: int) -> Tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(";"))
    except ValueError as e:
        raise CodebookError(f"line {lineno}: bad index list '{text}'") from e


def _parse_complex(re_text: str, im_text: str, lineno: int) -> complex:
    try:
        return complex(float(re_text), float(im_text))
    except ValueError as e:
        raise CodebookError(f"line {lineno}: bad number") from e


def parse_report(text: str) -> PrecoderReport:
    """
    Parse the text format back into a PrecoderReport.

    Raises:
        CodebookError: Malformed text or a report that fails validation
    """
    lines = [(i + 1, line.strip()) for i, line in enumerate(text.splitlines())]
    lines = [(i, line) for i, line in lines if line]
    if not lines or lines[0][1] != HEADER:
        raise CodebookError("line 1: missing report header")
    if len(lines) < 2:
        raise CodebookError("missing report record")

    lineno, line = lines[1]
    head = _fields(line, lineno, "report")
    missing = [k for k in _REPORT_KEYS if k not in head]
    if missing:
        raise CodebookError(f"line {lineno}: missing fields {', '.join(missing)}")

    blocks: List[dict] = []
    for lineno, line in lines[2:]:
        if line.startswith("block"):
            fields = _fields(line, lineno, "block")
            try:
                scale_re, scale_im = fields["scale"].split(",")
                blocks.append(
                    {
                        "trp": int(fields["trp"]),
                        "layer": int(fields["layer"]),
                        "spatial_indices": _parse_indices(fields["spatial"], lineno),
                        "frequency_indices": _parse_indices(fields["frequency"], lineno),
                        "time_indices": _parse_indices(fields["time"], lineno),
                        "scale": _parse_complex(scale_re, scale_im, lineno),
                        "coefficients": [],
                    }
                )
            except (KeyError, ValueError) as e:
                raise CodebookError(f"line {lineno}: malformed block record") from e
            continue
        if not blocks:
            raise CodebookError(f"line {lineno}: coefficient before any block")
        parts = line.split(",")
        if len(parts) != 5:
            raise CodebookError(f"line {lineno}: expected trp,row,col,re,im")
        try:
            trp, row, col = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as e:
            raise CodebookError(f"line {lineno}: bad coefficient index") from e
        if trp != blocks[-1]["trp"]:
            raise CodebookError(f"line {lineno}: coefficient trp {trp} outside its block")
        value = _parse_complex(parts[3], parts[4], lineno)
        blocks[-1]["coefficients"].append(Coefficient(row=row, col=col, value=value))

    try:
        return PrecoderReport(
            kind=head["kind"],
            quantizer_id=head["quantizer"],
            basis_kind=head["basis"],
            ports=int(head["ports"]),
            spatial_dimension=int(head["spatial_dimension"]) if "spatial_dimension" in head else None,
            n_vertical=int(head["n_vertical"]),
            freq_units=int(head["freq_units"]),
            slots=int(head["slots"]),
            trp_count=int(head["trp_count"]),
            layers=int(head["layers"]),
            blocks=tuple(ReportBlock(**b) for b in blocks),
        )
    except (ValidationError, ValueError) as e:
        raise CodebookError(f"invalid report: {e}") from e


def write_report(report: PrecoderReport, path: Union[str, Path]) -> Path:
    """Write a report file; raises OutputError on I/O failure."""
    path = Path(path)
    try:
        path.write_text(serialize_report(report), encoding="utf-8")
    except OSError as e:
        raise OutputError(str(path), "cannot write report", e) from e
    logger.info("report_written", path=str(path), kind=report.kind, blocks=len(report.blocks))
    return path


def read_report(path: Union[str, Path]) -> PrecoderReport:
    """Read a report file; raises OutputError on I/O failure."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OutputError(str(path), "cannot read report", e) from e
    return parse_report(text)
