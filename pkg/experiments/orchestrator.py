"""
Experiment orchestration.

Every experiment module exposes NAME and run_drop(config, drop, rng) -> rows.
Drops get independent generators from services.seeding, may run in a process
pool, and are merged in drop order, so the table does not depend on how the
drops were scheduled.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from common import __version__
from common.logging import get_logger
from models.experiment import SCHEMAS, ExperimentConfig, ResultTable
from services.config_loader import config_hash
from services.seeding import derive_seed, drop_rng

from . import beam_sim, cjt_sinr, occ, power_ratio, predict, srs_mse, upt

logger = get_logger(__name__)

Row = Tuple
DropRunner = Callable[[ExperimentConfig, int, np.random.Generator], List[Row]]


@dataclass(frozen=True)
class Experiment:
    """Registry entry: a per-drop runner and an optional drop-free shortcut."""

    name: str
    run_drop: DropRunner
    run_once: Optional[Callable[[ExperimentConfig], Optional[List[Row]]]] = None


REGISTRY: Dict[str, Experiment] = {
    module.NAME: Experiment(module.NAME, module.run_drop, getattr(module, "run_once", None))
    for module in (power_ratio, srs_mse, cjt_sinr, predict, beam_sim, upt, occ)
}


def run_single_drop(config: ExperimentConfig, drop: int) -> List[Row]:
    """Rows of one drop, seeded from (config.seed, drop)."""
    experiment = REGISTRY[config.experiment]
    rows = experiment.run_drop(config, drop, drop_rng(config.seed, drop))
    logger.debug(
        "drop_completed",
        experiment=config.experiment,
        drop=drop,
        drop_seed=derive_seed(config.seed, drop),
        rows=len(rows),
    )
    return rows


def _run_drops(config: ExperimentConfig) -> List[Row]:
    drops = range(config.drops)
    workers = min(config.workers, config.drops)
    if workers <= 1:
        per_drop = [run_single_drop(config, d) for d in drops]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_drop = list(pool.map(run_single_drop, repeat(config), drops))
    return [row for rows in per_drop for row in rows]


def run_experiment(config: ExperimentConfig) -> ResultTable:
    """
    Run a validated experiment config.

    Args:
        config: Validated ExperimentConfig

    Returns:
        ResultTable with the experiment's schema and provenance metadata.
        drops=0 yields a header-only table.
    """
    experiment = REGISTRY[config.experiment]
    digest = config_hash(config)
    logger.info(
        "experiment_started",
        experiment=config.experiment,
        seed=config.seed,
        drops=config.drops,
        workers=config.workers,
        config_hash=digest[:12],
    )
    start = time.perf_counter()

    rows = experiment.run_once(config) if experiment.run_once else None
    if rows is None:
        rows = _run_drops(config)

    table = ResultTable(
        experiment=config.experiment,
        header=SCHEMAS[config.experiment],
        rows=rows,
        metadata={
            "experiment": config.experiment,
            "seed": str(config.seed),
            "config_hash": digest,
            "tool_version": __version__,
        },
    )
    logger.info(
        "experiment_completed",
        experiment=config.experiment,
        rows=len(rows),
        duration_s=round(time.perf_counter() - start, 3),
    )
    return table
