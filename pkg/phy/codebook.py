"""
CSI codebooks: quantization, compression and reconstruction.

Conventions:
- Precoders live in the space of channel columns: a codeword w is good for a
  channel H (P x F) when ||H^H w||^2 is large.
- Dual-polarized ports are ordered [pol 0 block, pol 1 block]; spatial DFT
  beam b of one block pairs with column b + P/2 of the other.
- Coefficients kept in a report are normalized by the strongest one, whose
  complex value is stored as the block scale.
"""

import itertools
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from common.errors import CodebookError, DegenerateChannelError, DimensionError
from common.logging import get_logger
from models.channel import BasisPair, ChannelSnapshot
from models.codebook import (
    CjtConfig,
    Coefficient,
    DopplerConfig,
    EType2Config,
    PrecoderReport,
    Quantizer,
    ReportBlock,
    Type1Config,
    Type1Result,
)
from phy.channel import dft_matrix, project, spatial_dft_basis

logger = get_logger(__name__)


# Coefficients below this normalized amplitude are not reported.
ZERO_TOLERANCE = 1e-12

AMPLITUDE_STEP_DB = -1.5
AMPLITUDE_LEVELS = 8
PHASE_LEVELS = 16

_AMPLITUDES = 10.0 ** (AMPLITUDE_STEP_DB * np.arange(AMPLITUDE_LEVELS) / 20.0)
_PHASES = np.exp(2j * np.pi * np.arange(PHASE_LEVELS) / PHASE_LEVELS)


def _as_matrix(h: Union[ChannelSnapshot, np.ndarray]) -> np.ndarray:
    return h.matrix if isinstance(h, ChannelSnapshot) else np.asarray(h, dtype=np.complex128)


def _top_indices(power: np.ndarray, count: int) -> np.ndarray:
    """Indices of the `count` largest entries; ties go to the lowest index."""
    order = np.argsort(-power, kind="stable")
    return order[:count]


# =============================================================================
# Coefficient quantizer
# =============================================================================

def quantize_coefficient(value: complex) -> complex:
    """
    amp8-psk16: nearest of 8 amplitudes (1.5 dB steps from 1) and 16 phases.

    Quantized values are built from the level tables, so quantizing again
    returns the identical value.
    """
    if value == 0:
        return 0j
    level = int(np.clip(np.rint(20.0 * np.log10(abs(value)) / AMPLITUDE_STEP_DB), 0, AMPLITUDE_LEVELS - 1))
    phase = int(np.rint(np.angle(value) / (2 * np.pi / PHASE_LEVELS))) % PHASE_LEVELS
    return complex(_AMPLITUDES[level] * _PHASES[phase])


def quantize_report(report: PrecoderReport, quantizer_id: Quantizer) -> PrecoderReport:
    """Apply a coefficient quantizer to every block of a report."""
    if quantizer_id == "none":
        return report
    blocks = tuple(
        b.model_copy(
            update={
                "coefficients": tuple(
                    Coefficient(row=c.row, col=c.col, value=quantize_coefficient(c.value))
                    for c in b.coefficients
                )
            }
        )
        for b in report.blocks
    )
    return report.model_copy(update={"blocks": blocks, "quantizer_id": quantizer_id})


def _normalized_block(
    trp: int,
    layer: int,
    spatial: Sequence[int],
    frequency: Sequence[int],
    kept: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
    time: Sequence[int] = (0,),
) -> ReportBlock:
    """Build a block from kept coefficients (already in (row, col) tie order)."""
    if kept.size == 0 or np.max(np.abs(kept)) == 0.0:
        return ReportBlock(
            trp=trp,
            layer=layer,
            spatial_indices=tuple(int(i) for i in spatial),
            frequency_indices=tuple(int(i) for i in frequency),
            time_indices=tuple(int(i) for i in time),
        )
    strongest = int(np.argmax(np.abs(kept)))
    scale = complex(kept[strongest])
    coefficients = []
    for idx, (value, r, c) in enumerate(zip(kept, rows, cols)):
        normalized = 1.0 + 0.0j if idx == strongest else complex(value / scale)
        if abs(normalized) < ZERO_TOLERANCE:
            continue
        coefficients.append(Coefficient(row=int(r), col=int(c), value=normalized))
    return ReportBlock(
        trp=trp,
        layer=layer,
        spatial_indices=tuple(int(i) for i in spatial),
        frequency_indices=tuple(int(i) for i in frequency),
        time_indices=tuple(int(i) for i in time),
        scale=scale,
        coefficients=tuple(coefficients),
    )


def _keep_top(c: np.ndarray, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top `count` entries of a 2-D coefficient array, ties by (row, col)."""
    flat = c.ravel()
    keep = _top_indices(np.abs(flat) ** 2, count)
    rows, cols = np.unravel_index(keep, c.shape)
    return flat[keep], rows, cols


def _dense_coefficients(block: ReportBlock, columns: int) -> np.ndarray:
    dense = np.zeros((len(block.spatial_indices), columns), dtype=np.complex128)
    for c in block.coefficients:
        dense[c.row, c.col] = c.value
    return dense * block.scale


# =============================================================================
# Type-I
# =============================================================================

def _cophases(levels: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(levels) / levels)


def type1_beam(cfg: Type1Config, l: int, m: int) -> np.ndarray:
    """Oversampled 2-D DFT beam v_{l,m} for one polarization block."""
    n1, n2 = cfg.n_horizontal, cfg.n_vertical
    o1, o2 = cfg.oversampling, cfg.oversampling_vertical
    u_h = np.exp(2j * np.pi * l * np.arange(n1) / (o1 * n1))
    u_v = np.exp(2j * np.pi * m * np.arange(n2) / (o2 * n2))
    return np.kron(u_v, u_h)


def type1_codeword(cfg: Type1Config, l: int, m: int, cophase_index: int) -> np.ndarray:
    """P x rank codeword for beam (l, m) and co-phase index."""
    v = type1_beam(cfg, l, m)
    phi = _cophases(cfg.cophase_levels)[cophase_index]
    if cfg.rank == 1:
        return np.concatenate([v, phi * v])[:, None] / math.sqrt(cfg.ports)
    layer0 = np.concatenate([v, phi * v])
    layer1 = np.concatenate([v, -phi * v])
    return np.stack([layer0, layer1], axis=1) / math.sqrt(2 * cfg.ports)


def _type1_candidates(cfg: Type1Config):
    """Yield (group, beam, cophase) in report order."""
    beams_h = cfg.n_horizontal * cfg.oversampling
    beams_v = cfg.n_vertical * cfg.oversampling_vertical
    cophases = range(cfg.cophase_levels)
    if cfg.beams_in_group == 1:
        for m, l in itertools.product(range(beams_v), range(beams_h)):
            for n in cophases:
                yield (l, m), (l, m), n
        return
    if cfg.n_vertical == 1:
        offsets = [(0, 0), (1, 0), (2, 0), (3, 0)]
        groups_v = 1
    else:
        offsets = [(0, 0), (1, 0), (0, 1), (1, 1)]
        groups_v = max(1, math.ceil(beams_v / 2))
    groups_h = max(1, math.ceil(beams_h / 2))
    for g2, g1 in itertools.product(range(groups_v), range(groups_h)):
        for k1, k2 in offsets:
            beam = ((2 * g1 + k1) % beams_h, (2 * g2 + k2) % beams_v)
            for n in cophases:
                yield (g1, g2), beam, n


def type1_quantize(
    h: Union[ChannelSnapshot, np.ndarray], cfg: Type1Config
) -> Type1Result:
    """
    Select the Type-I codeword maximizing ||H^H W||_F^2.

    Exhaustive search over beam groups (W_1) and in-group beam plus
    co-phase (W_2). The first maximum in enumeration order wins.

    Args:
        h: Wideband channel, P x F (one column per frequency unit)
        cfg: Type-I configuration

    Returns:
        Type1Result with the report and the unit-norm beamformer

    Raises:
        DimensionError: If P does not match cfg.ports
    """
    matrix = _as_matrix(h)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    if matrix.shape[0] != cfg.ports:
        raise DimensionError(f"channel has {matrix.shape[0]} ports, codebook expects {cfg.ports}")

    best = None
    for group, beam, n in _type1_candidates(cfg):
        w = type1_codeword(cfg, beam[0], beam[1], n)
        gain = float(np.sum(np.abs(matrix.conj().T @ w) ** 2))
        if best is None or gain > best[0]:
            best = (gain, group, beam, n, w)
    gain, group, beam, n, w = best

    beams_h = cfg.n_horizontal * cfg.oversampling
    beam_count = beams_h * cfg.n_vertical * cfg.oversampling_vertical
    flat = beam[0] + beams_h * beam[1]
    phi = complex(_cophases(cfg.cophase_levels)[n])
    blocks = []
    for layer in range(cfg.rank):
        sign = 1.0 if layer == 0 else -1.0
        blocks.append(
            ReportBlock(
                trp=0,
                layer=layer,
                spatial_indices=(flat, flat + beam_count),
                frequency_indices=(0,),
                scale=complex(w[0, layer]),
                coefficients=(
                    Coefficient(row=0, col=0, value=1.0 + 0.0j),
                    Coefficient(row=1, col=0, value=sign * phi),
                ),
            )
        )
    report = PrecoderReport(
        kind="type1",
        ports=cfg.ports,
        n_vertical=cfg.n_vertical,
        spatial_dimension=2 * beam_count,
        freq_units=1,
        layers=cfg.rank,
        blocks=tuple(blocks),
    )
    logger.debug("type1_selected", beam=beam, group=group, cophase=n, gain=gain)
    return Type1Result(
        report=report, beamformer=w, beam=beam, group=group, cophase_index=n, gain=gain
    )


# =============================================================================
# Shared projection / selection for eType-II, CJT and Doppler codebooks
# =============================================================================

def _select_spatial(row_power: np.ndarray, beams: int, paired: bool) -> np.ndarray:
    """2L spatial columns: L shared beams per polarization when paired."""
    if paired:
        half = row_power.shape[0] // 2
        beam_power = row_power[:half] + row_power[half:]
        chosen = np.sort(_top_indices(beam_power, beams))
        return np.concatenate([chosen, chosen + half])
    return np.sort(_top_indices(row_power, 2 * beams))


def _compress_block(
    coefficients: np.ndarray,
    spatial: np.ndarray,
    freq_count: int,
    top_k: int,
    frequency: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Select frequency columns (unless given) and keep top_k coefficients."""
    selected = coefficients[spatial, :]
    if frequency is None:
        col_power = np.sum(np.abs(selected) ** 2, axis=0)
        frequency = np.sort(_top_indices(col_power, freq_count))
    kept = _keep_top(selected[:, frequency], top_k)
    return spatial, frequency, kept


def _layer_stack(precoders: np.ndarray) -> np.ndarray:
    arr = np.asarray(precoders, dtype=np.complex128)
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3:
        raise DimensionError(f"precoders must be (layers, P, F), got shape {arr.shape}")
    return arr


def _report_spatial_basis(report: PrecoderReport) -> np.ndarray:
    n1 = report.ports // (2 * report.n_vertical)
    return spatial_dft_basis(n1, report.n_vertical, 2)


# =============================================================================
# Enhanced Type-II
# =============================================================================

def etype2_compress(precoders: np.ndarray, cfg: EType2Config) -> PrecoderReport:
    """
    Enhanced Type-II compression W = W_1 W_2 W_f^H per layer.

    W_1 (2L DFT beams, shared by both polarizations and all layers) is picked
    by projected power summed over layers; Z frequency DFT columns and the
    top_K coefficients are picked per layer.

    Args:
        precoders: (layers, P, F) or (P, F) per-layer vectors over F units
        cfg: eType-II configuration

    Returns:
        PrecoderReport(kind="etype2")

    Raises:
        CodebookError: More layers than 8 or than cfg.layers
        DimensionError: P or F mismatch
    """
    stack = _layer_stack(precoders)
    layers, ports, units = stack.shape
    if layers > cfg.layers:
        raise CodebookError(f"{layers} layers given, configuration allows {cfg.layers}")
    if ports != cfg.ports or units != cfg.freq_units_F:
        raise DimensionError(
            f"precoders are {ports} x {units}, configuration expects {cfg.ports} x {cfg.freq_units_F}"
        )

    basis = BasisPair(
        spatial=spatial_dft_basis(ports // (2 * cfg.n_vertical), cfg.n_vertical, 2),
        frequency=dft_matrix(units),
        kind="dft",
    )
    coefficients = [project(stack[layer], basis) for layer in range(layers)]
    row_power = sum(np.sum(np.abs(c) ** 2, axis=1) for c in coefficients)
    spatial = _select_spatial(row_power, cfg.beams_L, paired=True)

    blocks = []
    for layer, c in enumerate(coefficients):
        spatial_sel, frequency, (kept, rows, cols) = _compress_block(
            c, spatial, cfg.delay_dim, cfg.top_K
        )
        blocks.append(_normalized_block(0, layer, spatial_sel, frequency, kept, rows, cols))

    report = PrecoderReport(
        kind="etype2",
        ports=ports,
        n_vertical=cfg.n_vertical,
        freq_units=units,
        layers=layers,
        blocks=tuple(blocks),
    )
    report = quantize_report(report, cfg.quantizer)
    logger.debug(
        "etype2_compressed",
        layers=layers,
        beams=cfg.beams_L,
        delay_dim=cfg.delay_dim,
        coefficients=len(report.coefficients),
    )
    return report


def etype2_matrix(report: PrecoderReport, layer: int = 0) -> np.ndarray:
    """Full P x F reconstruction W_1 (W_2 W_f^H) of one layer."""
    spatial_basis = _report_spatial_basis(report)
    freq_basis = dft_matrix(report.freq_units)
    block = report.block(0, layer)
    dense = _dense_coefficients(block, len(block.frequency_indices))
    w1 = spatial_basis[:, list(block.spatial_indices)]
    wf = freq_basis[:, list(block.frequency_indices)]
    return w1 @ dense @ wf.conj().T


def etype2_reconstruct(report: PrecoderReport, x: int) -> np.ndarray:
    """
    Beamformer W^(x) = [w_0^(x) ... w_{layers-1}^(x)] at frequency unit x.

    Raises:
        CodebookError: x outside [0, F)
    """
    if not 0 <= x < report.freq_units:
        raise CodebookError(f"frequency unit {x} outside [0, {report.freq_units})")
    columns = [etype2_matrix(report, layer)[:, x] for layer in range(report.layers)]
    return np.stack(columns, axis=1)


# =============================================================================
# Multi-TRP coherent joint transmission
# =============================================================================

def _default_cjt_bases(cfg: CjtConfig, units: int) -> List[BasisPair]:
    spatial = spatial_dft_basis(cfg.ports_per_trp // (2 * cfg.n_vertical), cfg.n_vertical, 2)
    pair = BasisPair(spatial=spatial, frequency=dft_matrix(units), kind="dft")
    return [pair] * cfg.trp_count


def cjt_compress(
    h_stacked: Union[ChannelSnapshot, np.ndarray],
    cfg: CjtConfig,
    bases: Optional[Sequence[BasisPair]] = None,
) -> PrecoderReport:
    """
    Per-TRP compression W = [W_{n,1} W_{n,2}]_n W_f^H.

    Each TRP block is projected onto its own bases. Spatial columns and K_n
    coefficients are chosen per TRP. Frequency columns are chosen per TRP, or
    once for all TRPs in joint mode by greedily adding the column with the
    largest remaining total power.

    Args:
        h_stacked: NP x N_f stacked channel or precoder
        cfg: CJT configuration
        bases: Per-TRP BasisPair (defaults to DFT bases)

    Returns:
        PrecoderReport(kind="cjt")

    Raises:
        DimensionError: Row blocks do not match trp_count x ports_per_trp
    """
    matrix = _as_matrix(h_stacked)
    n, p = cfg.trp_count, cfg.ports_per_trp
    if matrix.ndim != 2 or matrix.shape[0] != n * p:
        raise DimensionError(f"stacked channel has shape {matrix.shape}, expected ({n * p}, N_f)")
    units = matrix.shape[1]
    bases = list(bases) if bases is not None else _default_cjt_bases(cfg, units)
    if len(bases) != n:
        raise DimensionError(f"{len(bases)} bases given for {n} TRPs")
    for basis in bases:
        if basis.spatial.shape[0] != p or basis.frequency.shape[0] != units:
            raise DimensionError("basis dimensions do not match the TRP block")
    if any(m > units for m in cfg.per_trp_freq):
        raise DimensionError(f"per_trp_freq exceeds {units} frequency units")

    coefficients = [project(matrix[i * p:(i + 1) * p, :], bases[i]) for i in range(n)]
    spatial = []
    for i in range(n):
        paired = bases[i].kind == "dft"
        row_power = np.sum(np.abs(coefficients[i]) ** 2, axis=1)
        spatial.append(_select_spatial(row_power, cfg.per_trp_beams[i], paired))

    common = None
    if cfg.joint_frequency_basis:
        total = sum(
            np.sum(np.abs(coefficients[i][spatial[i], :]) ** 2, axis=0) for i in range(n)
        )
        remaining = list(range(units))
        chosen = []
        for _ in range(cfg.per_trp_freq[0]):
            best = max(remaining, key=lambda col: (total[col], -col))
            chosen.append(best)
            remaining.remove(best)
        common = np.array(sorted(chosen))

    blocks = []
    for i in range(n):
        spatial_sel, frequency, (kept, rows, cols) = _compress_block(
            coefficients[i], spatial[i], cfg.per_trp_freq[i], cfg.per_trp_topK[i], common
        )
        blocks.append(_normalized_block(i, 0, spatial_sel, frequency, kept, rows, cols))

    report = PrecoderReport(
        kind="cjt",
        basis_kind=bases[0].kind,
        ports=p,
        n_vertical=cfg.n_vertical,
        freq_units=units,
        trp_count=n,
        blocks=tuple(blocks),
    )
    report = quantize_report(report, cfg.quantizer)
    logger.debug(
        "cjt_compressed",
        trp_count=n,
        joint=cfg.joint_frequency_basis,
        coefficients=[report.coefficient_count(i) for i in range(n)],
    )
    return report


def cjt_reconstruct(
    report: PrecoderReport, bases: Optional[Sequence[BasisPair]] = None
) -> np.ndarray:
    """Stacked NP x N_f reconstruction of a CJT report."""
    if bases is None:
        spatial = _report_spatial_basis(report)
        pair = BasisPair(spatial=spatial, frequency=dft_matrix(report.freq_units), kind="dft")
        bases = [pair] * report.trp_count
    rows = []
    for trp in range(report.trp_count):
        block = report.block(trp, 0)
        dense = _dense_coefficients(block, len(block.frequency_indices))
        w1 = bases[trp].spatial[:, list(block.spatial_indices)]
        wf = bases[trp].frequency[:, list(block.frequency_indices)]
        rows.append(w1 @ dense @ wf.conj().T)
    return np.vstack(rows)


# =============================================================================
# Power ratio (sparsity of the angle-delay representation)
# =============================================================================

def _sorted_cumulative_power(h: Union[ChannelSnapshot, np.ndarray], basis: BasisPair) -> np.ndarray:
    c = project(_as_matrix(h), basis)
    power = np.sort(np.abs(c.ravel()) ** 2)[::-1]
    cumulative = np.cumsum(power)
    if cumulative[-1] == 0.0:
        raise DegenerateChannelError("undefined ratio")
    return cumulative


def power_ratio(h: Union[ChannelSnapshot, np.ndarray], basis: BasisPair, k: int) -> float:
    """
    Fraction of energy in the K strongest coefficients of C = W_1^H H W_f.

    Args:
        h: P x N_f channel
        basis: Spatial/frequency basis pair
        k: Number of coefficients, 1 <= K <= P * N_f

    Returns:
        r in [0, 1]; exactly 1 at K = P * N_f

    Raises:
        CodebookError: K out of range
        DegenerateChannelError: Zero-energy channel
    """
    cumulative = _sorted_cumulative_power(h, basis)
    if not 1 <= k <= cumulative.size:
        raise CodebookError(f"K={k} outside [1, {cumulative.size}]")
    return float(cumulative[k - 1] / cumulative[-1])


def power_ratio_curve(
    h: Union[ChannelSnapshot, np.ndarray], basis: BasisPair, ks: Sequence[int]
) -> np.ndarray:
    """power_ratio evaluated for several K with one projection."""
    cumulative = _sorted_cumulative_power(h, basis)
    ks = np.asarray(ks, dtype=int)
    if np.any(ks < 1) or np.any(ks > cumulative.size):
        raise CodebookError(f"K values must lie in [1, {cumulative.size}]")
    return cumulative[ks - 1] / cumulative[-1]


# =============================================================================
# Doppler-domain codebook
# =============================================================================

def doppler_compress(predicted: np.ndarray, cfg: DopplerConfig) -> PrecoderReport:
    """
    Space-frequency-time compression W = W_1 W_2 (W_f kron W_D)^H.

    Column f * N_slot + s of `predicted` is frequency unit f at slot s. 2L
    spatial beams, M frequency and T time DFT columns are selected by
    projected power, then the K strongest of the 2L x M x T coefficients are
    kept (column index m * T + t).

    Args:
        predicted: P x (N_f * N_slot) predicted channel
        cfg: Doppler codebook configuration

    Returns:
        PrecoderReport(kind="doppler")

    Raises:
        DimensionError: Shape does not match the configuration
    """
    et = cfg.etype2
    slots = cfg.slots_N_slot
    matrix = np.asarray(predicted, dtype=np.complex128)
    if matrix.shape != (et.ports, et.freq_units_F * slots):
        raise DimensionError(
            f"predicted channel has shape {matrix.shape}, expected "
            f"({et.ports}, {et.freq_units_F * slots})"
        )
    cube = matrix.reshape(et.ports, et.freq_units_F, slots)
    w1 = spatial_dft_basis(et.ports // (2 * et.n_vertical), et.n_vertical, 2)
    wf = dft_matrix(et.freq_units_F)
    # time column t matches Doppler t / (N_slot dt); channels rotate as exp(+j 2 pi v t)
    wd = dft_matrix(slots).conj()
    c = np.einsum("pb,pfs,fm,st->bmt", w1.conj(), cube, wf, wd)

    spatial = _select_spatial(np.sum(np.abs(c) ** 2, axis=(1, 2)), et.beams_L, paired=True)
    c = c[spatial]
    frequency = np.sort(_top_indices(np.sum(np.abs(c) ** 2, axis=(0, 2)), et.delay_dim))
    c = c[:, frequency, :]
    time = np.sort(_top_indices(np.sum(np.abs(c) ** 2, axis=(0, 1)), cfg.time_basis_T))
    c = c[:, :, time].reshape(len(spatial), len(frequency) * len(time))
    kept, rows, cols = _keep_top(c, cfg.coefficients_K)

    block = _normalized_block(0, 0, spatial, frequency, kept, rows, cols, time=time)
    report = PrecoderReport(
        kind="doppler",
        ports=et.ports,
        n_vertical=et.n_vertical,
        freq_units=et.freq_units_F,
        slots=slots,
        blocks=(block,),
    )
    report = quantize_report(report, et.quantizer)
    logger.debug(
        "doppler_compressed",
        time_indices=block.time_indices,
        coefficients=len(report.coefficients),
    )
    return report


def doppler_reconstruct(report: PrecoderReport) -> np.ndarray:
    """P x (N_f * N_slot) reconstruction of a Doppler report."""
    block = report.block(0, 0)
    w1 = _report_spatial_basis(report)[:, list(block.spatial_indices)]
    wf = dft_matrix(report.freq_units)[:, list(block.frequency_indices)]
    wd = dft_matrix(report.slots).conj()[:, list(block.time_indices)]
    dense = _dense_coefficients(block, wf.shape[1] * wd.shape[1])
    return w1 @ dense @ np.kron(wf, wd).conj().T
