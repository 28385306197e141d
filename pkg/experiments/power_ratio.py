"""
power-ratio: energy captured by the K strongest angle-delay coefficients.

Each drop draws a clustered channel process. The eigen basis is trained on
the first covariance_snapshots slots and both bases are scored on the next
slot, which the eigen basis has not seen.
"""

from typing import List, Tuple

import numpy as np

from models.channel import ArrayConfig, BasisPair, ChannelProcess, ChannelSnapshot, FrequencyGrid
from models.experiment import ExperimentConfig, PowerRatioParams
from phy.channel import dft_basis, eigen_basis, process_snapshot, process_snapshots, random_clusters
from phy.codebook import power_ratio_curve

NAME = "power-ratio"


def drop_channels(
    params: PowerRatioParams, rng: np.random.Generator
) -> Tuple[ChannelSnapshot, List[ChannelSnapshot], ArrayConfig, FrequencyGrid]:
    """(evaluated snapshot, training snapshots, array, grid) for one drop."""
    array = ArrayConfig(
        ports_vertical=params.ports_vertical,
        ports_horizontal=params.ports_horizontal,
        polarizations=params.polarizations,
    )
    grid = FrequencyGrid(units=params.units)
    paths = random_clusters(
        rng,
        array,
        grid,
        max_doppler_hz=params.max_doppler_hz,
        path_range=(params.path_min, params.path_max),
    )
    process = ChannelProcess(paths=paths, array=array, grid=grid)
    training = process_snapshots(process, 0, params.covariance_snapshots)
    target = process_snapshot(process, params.covariance_snapshots)
    return target, training, array, grid


def drop_bases(params: PowerRatioParams, rng: np.random.Generator) -> Tuple[ChannelSnapshot, List[BasisPair]]:
    """Evaluated snapshot and the configured bases, in params.bases order."""
    target, training, array, grid = drop_channels(params, rng)
    built = {}
    for kind in params.bases:
        if kind not in built:
            built[kind] = dft_basis(array, grid) if kind == "dft" else eigen_basis(training)
    return target, [built[kind] for kind in params.bases]


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.power_ratio
    target, bases = drop_bases(params, rng)
    rows = []
    for kind, basis in zip(params.bases, bases):
        curve = power_ratio_curve(target, basis, params.k_values)
        rows.extend((drop, kind, int(k), float(r)) for k, r in zip(params.k_values, curve))
    return rows
