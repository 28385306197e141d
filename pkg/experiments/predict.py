"""
predict: Doppler-track prediction against stale CSI.

Each drop observes snapshots_N slots of a moving-UE channel, predicts the
next future_M slots and scores both the prediction and the last observed
snapshot (stale CSI) against the true future channel.
"""

from typing import List, Tuple

import numpy as np

from models.channel import ArrayConfig, ChannelProcess, FrequencyGrid
from models.experiment import ExperimentConfig, PredictParams
from models.prediction import PredictionConfig
from phy.channel import dft_basis, process_snapshots, random_clusters
from phy.prediction import extract_doppler, nmse, predict

NAME = "predict"


def prediction_config(params: PredictParams) -> PredictionConfig:
    """PredictionConfig with max Doppler fD = normalized_doppler / (M dt)."""
    return PredictionConfig(
        snapshots_N=params.snapshots_N,
        slot_gap_dt=params.slot_gap_dt,
        future_M=params.future_M,
        pairs_K=params.pairs_K,
        doppler_oversampling=params.doppler_oversampling,
        max_doppler_hz=params.normalized_doppler / (params.future_M * params.slot_gap_dt),
    )


def drop_process(params: PredictParams, rng: np.random.Generator) -> ChannelProcess:
    """Clustered channel whose path Dopplers are bounded by the configured fD."""
    cfg = prediction_config(params)
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
        max_doppler_hz=cfg.max_doppler_hz,
        path_range=(params.path_min, params.path_max),
    )
    return ChannelProcess(paths=paths, array=array, grid=grid, slot_duration_s=params.slot_gap_dt)


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.predict
    cfg = prediction_config(params)
    process = drop_process(params, rng)
    bases = dft_basis(process.array, process.grid)

    observed = process_snapshots(process, 0, cfg.snapshots_N)
    future = process_snapshots(process, cfg.snapshots_N, cfg.future_M)
    tracks = extract_doppler(observed, cfg, bases)
    predicted = predict(tracks, cfg, bases, start_slot=observed[-1].timestamp)
    stale = observed[-1].matrix

    return [
        (drop, m + 1, nmse(p.matrix, truth.matrix), nmse(stale, truth.matrix))
        for m, (p, truth) in enumerate(zip(predicted, future))
    ]
