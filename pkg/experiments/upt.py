"""
upt: user perceived throughput of a burst log.

With upt.bursts_path set (or --bursts on the command line) the log is read
from CSV and summarized in a single row. Otherwise every drop synthesizes a
burst set: 0.5 Mb mean exponential sizes delivered at a per-burst rate drawn
log-uniformly between 1 and 100 Mb/s.
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.evaluation import BurstRecord
from models.experiment import ExperimentConfig
from phy.evaluator import BURST_BITS, upt
from services.result_writer import read_bursts

NAME = "upt"

MAX_SYNTHETIC_BURSTS = 20


def summarize(bursts: Sequence[BurstRecord]) -> Tuple:
    """(bursts, total_bits, total_duration_s, upt_bps) row."""
    return (
        len(bursts),
        float(sum(b.size_bits for b in bursts)),
        float(sum(b.duration_s for b in bursts)),
        upt(bursts),
    )


def synthetic_bursts(rng: np.random.Generator) -> List[BurstRecord]:
    count = int(rng.integers(1, MAX_SYNTHETIC_BURSTS + 1))
    sizes = rng.exponential(BURST_BITS, size=count) + 1.0
    rates = 10.0 ** rng.uniform(6.0, 8.0, size=count)
    return [
        BurstRecord(size_bits=float(s), duration_s=float(s / r)) for s, r in zip(sizes, rates)
    ]


def run_once(config: ExperimentConfig) -> Optional[List[Tuple]]:
    """Single summary row of the configured burst log, or None to run drops."""
    if config.upt.bursts_path is None:
        return None
    return [summarize(read_bursts(config.upt.bursts_path))]


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    return [summarize(synthetic_bursts(rng))]
