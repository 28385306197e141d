"""
Channel synthesis and basis construction.

A channel snapshot is a P x N_f matrix: column f is the per-port channel on
frequency unit f. Each path contributes

    gain * exp(j 2 pi v t) * outer(a, d)

where a is the unit-norm steering vector (identical in both polarization
blocks, second block co-phased by the path's polarization_phase) and d is the
delay vector d[f] = exp(-j 2 pi f unit_spacing tau).
"""

import math
from typing import List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg

from common.errors import DegenerateChannelError, DimensionError, EmptyInputError
from common.logging import get_logger
from models.channel import (
    ArrayConfig,
    BasisPair,
    ChannelProcess,
    ChannelSnapshot,
    FrequencyGrid,
    PathCluster,
)

logger = get_logger(__name__)


def _block_response(azimuth: float, zenith: float, array: ArrayConfig) -> np.ndarray:
    """Unnormalized response of one polarization block, vertical-major ordering."""
    v = np.arange(array.ports_vertical)
    h = np.arange(array.ports_horizontal)
    phase_v = 2 * np.pi * array.spacing_v * v * math.cos(zenith)
    phase_h = 2 * np.pi * array.spacing_h * h * math.sin(zenith) * math.sin(azimuth)
    return np.kron(np.exp(1j * phase_v), np.exp(1j * phase_h))


def steering_vector(azimuth: float, zenith: float, array: ArrayConfig) -> np.ndarray:
    """
    Unit-norm array response toward (azimuth, zenith).

    Elements sit on the y (horizontal) and z (vertical) axes. Element phase is
    2*pi times the projection of its position onto the wave direction.

    Args:
        azimuth: Azimuth in radians (0 = broadside)
        zenith: Zenith in radians (pi/2 = horizon)
        array: Array geometry

    Returns:
        Complex vector of length P

    Examples:
        >>> steering_vector(0.0, math.pi / 2, ArrayConfig())
        array([1.+0.j])
    """
    block = _block_response(azimuth, zenith, array)
    full = np.tile(block, array.polarizations)
    return full / math.sqrt(array.total_ports)


def delay_vector(delay_s: float, grid: FrequencyGrid) -> np.ndarray:
    """d[f] = exp(-j 2 pi f unit_spacing tau)."""
    f = np.arange(grid.units)
    return np.exp(-2j * np.pi * f * grid.unit_spacing_hz * delay_s)


def path_response(path: PathCluster, array: ArrayConfig) -> np.ndarray:
    """Steering vector with the path's polarization co-phase applied."""
    a = steering_vector(path.azimuth, path.zenith, array)
    if array.polarizations == 2 and path.polarization_phase != 0.0:
        a = a.copy()
        a[array.block_ports:] *= np.exp(1j * path.polarization_phase)
    return a


def synthesize_channel(
    paths: Sequence[PathCluster],
    t: float,
    array: ArrayConfig,
    grid: FrequencyGrid,
    slot: int = 0,
) -> ChannelSnapshot:
    """
    Sum of path contributions at time t.

    Args:
        paths: Propagation paths (may be empty)
        t: Evaluation time in seconds
        array: Array geometry
        grid: Frequency grid
        slot: Slot index recorded as the snapshot timestamp

    Returns:
        ChannelSnapshot with a P x N_f matrix

    Raises:
        DimensionError: If a path delay is not representable on the grid
    """
    matrix = np.zeros((array.total_ports, grid.units), dtype=np.complex128)
    for path in paths:
        if path.delay_s >= grid.tau_max:
            raise DimensionError(
                f"path delay {path.delay_s:.3e}s not representable (tau_max={grid.tau_max:.3e}s)"
            )
        phasor = path.gain * np.exp(2j * np.pi * path.doppler_hz * t)
        matrix += phasor * np.outer(path_response(path, array), delay_vector(path.delay_s, grid))
    return ChannelSnapshot(matrix=matrix, timestamp=slot, time_s=t)


def process_snapshot(process: ChannelProcess, slot: int) -> ChannelSnapshot:
    """Snapshot of a channel process at a slot index."""
    t = slot * process.slot_duration_s
    return synthesize_channel(process.paths, t, process.array, process.grid, slot=slot)


def process_snapshots(process: ChannelProcess, start: int, count: int) -> List[ChannelSnapshot]:
    """Consecutive snapshots [start, start + count)."""
    return [process_snapshot(process, start + k) for k in range(count)]


def random_clusters(
    rng: np.random.Generator,
    array: ArrayConfig,
    grid: FrequencyGrid,
    max_doppler_hz: float = 0.0,
    sector: float = math.radians(60.0),
    path_range: Tuple[int, int] = (2, 8),
    zenith_spread: float = math.radians(10.0),
) -> List[PathCluster]:
    """
    Draw the default clustered scenario.

    L in [2, 8] paths, azimuth uniform in +-sector, delays uniform in
    [0, tau_max / 2), Rayleigh gains normalized so the expected squared
    Frobenius norm of a snapshot is P * N_f.

    Args:
        rng: Seeded generator
        array: Array geometry
        grid: Frequency grid
        max_doppler_hz: Maximum Doppler; each path gets fD * cos(uniform angle)
        sector: Half-width of the azimuth sector in radians
        path_range: Inclusive bounds on the path count
        zenith_spread: Half-width of the zenith range around the horizon

    Returns:
        List of PathCluster
    """
    count = int(rng.integers(path_range[0], path_range[1] + 1))
    powers = rng.exponential(1.0, size=count)
    powers *= array.total_ports / powers.sum()
    gains = np.sqrt(powers / 2) * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
    azimuths = rng.uniform(-sector, sector, size=count)
    zeniths = math.pi / 2 + rng.uniform(-zenith_spread, zenith_spread, size=count)
    delays = rng.uniform(0.0, grid.tau_max / 2, size=count)
    dopplers = max_doppler_hz * np.cos(rng.uniform(0.0, 2 * np.pi, size=count))
    pol = rng.uniform(0.0, 2 * np.pi, size=count)
    return [
        PathCluster(
            gain=complex(gains[i]),
            doppler_hz=float(dopplers[i]),
            azimuth=float(azimuths[i]),
            zenith=float(zeniths[i]),
            delay_s=float(delays[i]),
            polarization_phase=float(pol[i]),
        )
        for i in range(count)
    ]


def dft_matrix(n: int, rotation: float = 0.0) -> np.ndarray:
    """
    Unitary DFT matrix with columns exp(+j 2 pi k (m + rotation) / n) / sqrt(n).

    The sign matches steering vectors and conjugated delay vectors, so column m
    is matched to spatial frequency (m + rotation) / n.
    """
    k = np.arange(n)[:, None]
    m = np.arange(n)[None, :] + rotation
    return np.exp(2j * np.pi * k * m / n) / math.sqrt(n)


def spatial_dft_basis(
    ports_horizontal: int,
    ports_vertical: int = 1,
    polarizations: int = 1,
    rotation: Tuple[float, float] = (0.0, 0.0),
) -> np.ndarray:
    """Block-diagonal (per polarization) kron(vertical DFT, horizontal DFT)."""
    q_h, q_v = rotation
    block = np.kron(dft_matrix(ports_vertical, q_v), dft_matrix(ports_horizontal, q_h))
    return linalg.block_diag(*([block] * polarizations))


def dft_basis(
    array: Union[ArrayConfig, int],
    grid: Union[FrequencyGrid, int],
    rotation: Tuple[float, float] = (0.0, 0.0),
) -> BasisPair:
    """
    DFT basis pair for an array and frequency grid.

    Args:
        array: ArrayConfig, or a port count treated as a single-polarized line
        grid: FrequencyGrid, or a unit count
        rotation: Oversampling offsets (q_h / O_h, q_v / O_v) in DFT bins

    Returns:
        BasisPair(kind="dft")
    """
    if isinstance(array, ArrayConfig):
        spatial = spatial_dft_basis(
            array.ports_horizontal, array.ports_vertical, array.polarizations, rotation
        )
    else:
        spatial = dft_matrix(int(array), rotation[0])
    units = grid.units if isinstance(grid, FrequencyGrid) else int(grid)
    return BasisPair(spatial=spatial, frequency=dft_matrix(units), kind="dft")


def _descending_eigvecs(cov: np.ndarray) -> np.ndarray:
    _, vecs = linalg.eigh(cov)
    return vecs[:, ::-1]


def eigen_basis(samples: Sequence[ChannelSnapshot]) -> BasisPair:
    """
    Eigen bases of the accumulated spatial and frequency covariances.

    Spatial basis: eigenvectors of sum(H H^H) (P x P). Frequency basis:
    eigenvectors of sum(H^H H) (N_f x N_f). Both in descending eigenvalue
    order, so C = W_1^H H W_f concentrates energy in the top-left corner.

    Args:
        samples: At least one snapshot of identical shape

    Returns:
        BasisPair(kind="eigen")

    Raises:
        EmptyInputError: No samples
        DimensionError: Mixed snapshot shapes
        DegenerateChannelError: All samples are zero ("empty covariance")
    """
    if not samples:
        raise EmptyInputError("eigen_basis needs at least one sample")
    shape = samples[0].matrix.shape
    spatial_cov = np.zeros((shape[0], shape[0]), dtype=np.complex128)
    freq_cov = np.zeros((shape[1], shape[1]), dtype=np.complex128)
    for s in samples:
        if s.matrix.shape != shape:
            raise DimensionError(f"snapshot shape {s.matrix.shape} differs from {shape}")
        h = s.matrix
        spatial_cov += h @ h.conj().T
        freq_cov += h.conj().T @ h
    if np.real(np.trace(spatial_cov)) <= 0.0:
        raise DegenerateChannelError("empty covariance")

    logger.debug("eigen_basis_built", samples=len(samples), ports=shape[0], units=shape[1])
    return BasisPair(
        spatial=_descending_eigvecs(spatial_cov),
        frequency=_descending_eigvecs(freq_cov),
        kind="eigen",
    )


def project(h: np.ndarray, basis: BasisPair) -> np.ndarray:
    """Angle-delay coefficients C = W_1^H H W_f."""
    if h.shape != (basis.spatial.shape[0], basis.frequency.shape[0]):
        raise DimensionError(
            f"channel shape {h.shape} does not match basis "
            f"({basis.spatial.shape[0]}, {basis.frequency.shape[0]})"
        )
    return basis.spatial.conj().T @ h @ basis.frequency


def back_project(c: np.ndarray, basis: BasisPair) -> np.ndarray:
    """H = W_1 C W_f^H."""
    return basis.spatial @ c @ basis.frequency.conj().T


def snapshot_table(snapshot: ChannelSnapshot):
    """Long-form table {port, unit, re, im} for debugging dumps."""
    ports, units = np.meshgrid(
        np.arange(snapshot.ports), np.arange(snapshot.units), indexing="ij"
    )
    return pd.DataFrame(
        {
            "port": ports.ravel(),
            "unit": units.ravel(),
            "re": snapshot.matrix.real.ravel(),
            "im": snapshot.matrix.imag.ravel(),
        }
    )

