"""
beam-sim: DCI vs MAC-CE beam indication along a preset trajectory.

All mechanisms of a drop share one simulation seed, so they see the same
indication random numbers and the same interfering beams.
"""

from typing import List, Tuple

import numpy as np

from models.beams import BeamScenario, IndicationModel
from models.experiment import BeamSimParams, ExperimentConfig
from phy.beams import mechanism_model, preset, simulate

NAME = "beam-sim"


def scenario_for(params: BeamSimParams) -> BeamScenario:
    """Preset scenario with the interference override applied."""
    scenario = preset(params.preset, params.sample_count)
    if params.interference is not None:
        scenario = scenario.model_copy(update={"interference": params.interference})
    return scenario


def indication_model(params: BeamSimParams, mechanism: str) -> IndicationModel:
    """Latency and BLER for one mechanism from the parameter block."""
    model = mechanism_model(mechanism, params.application_delay_s)
    if mechanism == "DCI":
        latency, bler = params.dci_latency_s, params.dci_bler
    else:
        latency, bler = params.mac_ce_latency_s, params.mac_ce_bler
    return model.model_copy(update={"latency_s": latency, "bler": bler})


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.beam_sim
    scenario = scenario_for(params)
    seed = int(rng.integers(0, 2**63))
    rows = []
    for mechanism in params.mechanisms:
        samples = simulate(scenario, indication_model(params, mechanism), seed=seed)
        rows.extend(
            (drop, s.sample_index, s.position_m, mechanism, s.sinr_db, s.se) for s in samples
        )
    return rows
