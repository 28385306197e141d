"""
cjt-sinr: single-TRP vs coherent joint transmission over random drops.

Every (mode, feedback) combination is evaluated on the same drop.
"""

from typing import List, Tuple

import numpy as np

from models.experiment import ExperimentConfig
from phy.evaluator import build_drop, run_drop as evaluate_drop

NAME = "cjt-sinr"


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.cjt_sinr
    scenario = build_drop(params.drop, rng)
    rows = []
    for mode in params.modes:
        for feedback in params.feedbacks:
            result = evaluate_drop(
                scenario,
                feedback=feedback,
                mode=mode,
                settings=params.settings,
                threshold_db=params.threshold_db,
            )
            rows.extend((drop, ue.ue, mode, feedback, ue.sinr_db, ue.se) for ue in result.ues)
    return rows
