"""
occ: DMRS port leakage for OCC-2 (12 ports) and OCC-4 (24 ports).

One set of per-port channels is drawn per drop and stretched over every
delay spread of the sweep, so rows of a drop differ only in OCC length and
delay spread.
"""

from typing import List, Tuple

import numpy as np

from models.evaluation import OccConfig, OccEstimate
from models.experiment import ExperimentConfig
from phy.evaluator import dmrs_port_channels, occ_port_estimation, port_mapping

NAME = "occ"


def leakage_stats(cfg: OccConfig, estimate: OccEstimate) -> Tuple[float, float]:
    """Mean and max leakage over ordered port pairs sharing a CDM group."""
    ports = estimate.leakage.shape[0]
    groups = [port_mapping(cfg, p)[0] for p in range(ports)]
    values = [
        estimate.leakage[p, q]
        for p in range(ports)
        for q in range(ports)
        if p != q and groups[p] == groups[q]
    ]
    if not values:
        return 0.0, 0.0
    return float(np.mean(values)), float(np.max(values))


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.occ
    configs = [OccConfig(occ_length=length) for length in params.occ_lengths]
    ports = max(cfg.total_ports for cfg in configs)
    channels = dmrs_port_channels(
        rng,
        ports,
        params.subcarriers,
        [ns * 1e-9 for ns in params.delay_spreads_ns],
        params.subcarrier_spacing_hz,
        params.taps,
    )
    rows = []
    for cfg in configs:
        for spread_ns, h in zip(params.delay_spreads_ns, channels):
            estimate = occ_port_estimation(cfg, h[: cfg.total_ports])
            mean_leakage, max_leakage = leakage_stats(cfg, estimate)
            rows.append(
                (drop, cfg.occ_length, cfg.total_ports, float(spread_ns), mean_leakage, max_leakage, estimate.nmse)
            )
    return rows
