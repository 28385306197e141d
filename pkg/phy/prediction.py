"""
Angle-delay Doppler tracking and CSI extrapolation.

Each strong angle-delay pair of C = W_1^H H W_f is modelled as one complex
exponential alpha exp(j 2 pi v t) across snapshots. Amplitudes are referenced
to the last observed snapshot (t = 0); predicted slots sit at t = m dt.
"""

import math
from typing import List, Optional, Sequence

import numpy as np

from common.errors import DegenerateChannelError, DimensionError, EmptyInputError
from common.logging import get_logger
from models.channel import BasisPair, ChannelSnapshot
from models.codebook import DopplerConfig, PrecoderReport
from models.prediction import DopplerTrack, PredictionConfig
from phy.channel import back_project, dft_matrix, project, spatial_dft_basis
from phy.codebook import doppler_compress

logger = get_logger(__name__)

# Pairs weaker than this fraction of the strongest carry no usable track.
PAIR_FLOOR = 1e-12


def angle_delay_project(snapshot: ChannelSnapshot, bases: BasisPair) -> np.ndarray:
    """C = W_1^H H W_f (raises DimensionError on mismatch)."""
    return project(snapshot.matrix, bases)


def doppler_grid(cfg: PredictionConfig) -> np.ndarray:
    """Oversampled Doppler grid k / (O N dt) inside (-1/(2 dt), 1/(2 dt)]."""
    points = cfg.doppler_oversampling * cfg.snapshots_N
    k = np.arange(-math.ceil(points / 2) + 1, points // 2 + 1)
    return k / (points * cfg.slot_gap_dt)


def extract_doppler(
    snapshots: Sequence[ChannelSnapshot], cfg: PredictionConfig, bases: BasisPair
) -> List[DopplerTrack]:
    """
    Fit one Doppler and amplitude per strong angle-delay pair.

    The pairs_K pairs with the largest time-averaged |C| are tracked (ties to
    the lowest flat index). For each, the Doppler is the peak of the
    oversampled time DFT of its coefficient series and the amplitude is the
    matched-filter projection at that Doppler, moved to the last snapshot.

    Args:
        snapshots: cfg.snapshots_N snapshots spaced by cfg.slot_gap_dt
        cfg: Prediction configuration
        bases: Angle-delay bases

    Returns:
        Up to pairs_K tracks, strongest first

    Raises:
        DimensionError: Wrong number of snapshots or basis mismatch
    """
    if len(snapshots) != cfg.snapshots_N:
        raise DimensionError(f"expected {cfg.snapshots_N} snapshots, got {len(snapshots)}")
    c = np.stack([angle_delay_project(s, bases) for s in snapshots])
    n, rows, cols = c.shape
    strength = np.mean(np.abs(c), axis=0).ravel()
    order = np.argsort(-strength, kind="stable")
    peak = strength[order[0]] if strength.size else 0.0
    chosen = [int(i) for i in order[: cfg.pairs_K] if strength[i] > PAIR_FLOOR * peak]
    if not chosen:
        return []

    series = c.reshape(n, rows * cols)[:, chosen].T
    grid = doppler_grid(cfg)
    times = np.arange(n) * cfg.slot_gap_dt
    steering = np.exp(-2j * np.pi * np.outer(times, grid)) / n
    spectrum = series @ steering
    best = np.argmax(np.abs(spectrum), axis=1)

    tracks = []
    last = (n - 1) * cfg.slot_gap_dt
    for idx, flat in enumerate(chosen):
        v = float(grid[best[idx]])
        amplitude = spectrum[idx, best[idx]] * np.exp(2j * np.pi * v * last)
        tracks.append(
            DopplerTrack(
                pair_index=(flat // cols, flat % cols),
                amplitude=complex(amplitude),
                doppler_hz=v,
            )
        )
    logger.debug("doppler_extracted", tracks=len(tracks), pairs=rows * cols)
    return tracks


def _coefficients_at(tracks: Sequence[DopplerTrack], shape, t: float) -> np.ndarray:
    c = np.zeros(shape, dtype=np.complex128)
    for track in tracks:
        c[track.pair_index] += track.amplitude * np.exp(2j * np.pi * track.doppler_hz * t)
    return c


def predict(
    tracks: Sequence[DopplerTrack],
    cfg: PredictionConfig,
    bases: BasisPair,
    start_slot: int = 0,
) -> List[ChannelSnapshot]:
    """
    Predicted snapshots at t = m dt, m = 1..future_M after the last observation.

    Raises:
        EmptyInputError: No tracks
    """
    if not tracks:
        raise EmptyInputError("predict needs at least one track")
    shape = (bases.spatial.shape[0], bases.frequency.shape[0])
    predicted = []
    for m in range(1, cfg.future_M + 1):
        t = m * cfg.slot_gap_dt
        h = back_project(_coefficients_at(tracks, shape, t), bases)
        predicted.append(ChannelSnapshot(matrix=h, timestamp=start_slot + m, time_s=t))
    return predicted


def reconstruct_last(tracks: Sequence[DopplerTrack], bases: BasisPair) -> np.ndarray:
    """Track model evaluated at the last observed snapshot (t = 0)."""
    shape = (bases.spatial.shape[0], bases.frequency.shape[0])
    return back_project(_coefficients_at(tracks, shape, 0.0), bases)


def stack_slots(snapshots: Sequence[ChannelSnapshot]) -> np.ndarray:
    """P x (N_f * N_slot) layout with column f * N_slot + s."""
    if not snapshots:
        raise EmptyInputError("stack_slots needs at least one snapshot")
    cube = np.stack([s.matrix for s in snapshots], axis=2)
    return cube.reshape(cube.shape[0], cube.shape[1] * cube.shape[2])


def nmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """||estimate - truth||^2 / ||truth||^2."""
    truth = np.asarray(truth)
    energy = float(np.sum(np.abs(truth) ** 2))
    if energy == 0.0:
        raise DegenerateChannelError("zero-energy reference")
    return float(np.sum(np.abs(np.asarray(estimate) - truth) ** 2) / energy)


def codebook_bases(doppler_cfg: DopplerConfig) -> BasisPair:
    """Dual-polarized DFT bases matching a Doppler codebook configuration."""
    et = doppler_cfg.etype2
    spatial = spatial_dft_basis(et.ports // (2 * et.n_vertical), et.n_vertical, 2)
    return BasisPair(spatial=spatial, frequency=dft_matrix(et.freq_units_F), kind="dft")


def predict_and_compress(
    snapshots: Sequence[ChannelSnapshot],
    cfg: PredictionConfig,
    doppler_cfg: DopplerConfig,
    bases: Optional[BasisPair] = None,
) -> PrecoderReport:
    """
    Track, predict future_M slots and compress them with the Doppler codebook.

    Raises:
        DimensionError: doppler_cfg.slots_N_slot differs from future_M
    """
    if doppler_cfg.slots_N_slot != cfg.future_M:
        raise DimensionError(
            f"Doppler codebook compresses {doppler_cfg.slots_N_slot} slots, "
            f"prediction produces {cfg.future_M}"
        )
    bases = bases if bases is not None else codebook_bases(doppler_cfg)
    tracks = extract_doppler(snapshots, cfg, bases)
    predicted = predict(tracks, cfg, bases, start_slot=snapshots[-1].timestamp)
    return doppler_compress(stack_slots(predicted), doppler_cfg)
