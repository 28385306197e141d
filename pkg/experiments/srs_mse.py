"""
srs-mse: channel estimation error with and without cyclic-shift hopping.

One target UE and one interferer on a different root sound the same
subcarriers N times. Without hopping the target keeps alpha = 0 and the
interferer alpha = pi; with hopping both draw independent shifts every
transmission. Taps, gains and noise are shared by the two modes of a drop.
"""

import math
from typing import List, Sequence, Tuple

import numpy as np

from models.experiment import ExperimentConfig, SrsMseParams
from models.srs import CsSchedule, SrsSequence
from phy.srs import (
    accumulate_pdp,
    apply_cs,
    cs_schedule,
    despread,
    estimate_channel,
    gen_sequence,
    random_taps,
    receive,
    select_taps,
    tap_channel,
    tap_error_count,
    to_delay_domain,
)

NAME = "srs-mse"

FIXED_INTERFERER_CS = math.pi


def despread_rows(
    target: np.ndarray,
    target_seq: SrsSequence,
    target_cs: CsSchedule,
    interferer: np.ndarray,
    interferer_seq: SrsSequence,
    interferer_cs: CsSchedule,
    noise_power: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    N x M despread observations.

    target and interferer are length-M (static) or N x M (time-varying)
    frequency responses.
    """
    count = len(target_cs.values)
    target = np.broadcast_to(np.asarray(target, dtype=np.complex128), (count, target_seq.length))
    interferer = np.broadcast_to(
        np.asarray(interferer, dtype=np.complex128), (count, interferer_seq.length)
    )
    rows = []
    for n in range(count):
        seq = apply_cs(target_seq, target_cs.values[n])
        obs = receive(
            target[n],
            seq,
            [(interferer[n], apply_cs(interferer_seq, interferer_cs.values[n]))],
            noise_power=noise_power,
            rng=rng,
            transmission_index=n,
        )
        rows.append(despread(obs, seq))
    return np.asarray(rows)


def schedules(
    params: SrsMseParams, hopping: bool, rng: np.random.Generator
) -> Tuple[CsSchedule, CsSchedule]:
    """(target, interferer) cyclic-shift schedules for one mode."""
    count = params.transmissions_N
    if not hopping:
        return (
            cs_schedule(count, "fixed"),
            cs_schedule(count, "fixed", fixed_value=FIXED_INTERFERER_CS),
        )
    return (
        cs_schedule(count, "hopping", rng, params.cs_grid),
        cs_schedule(count, "hopping", rng, params.cs_grid),
    )


def _target_response(
    params: SrsMseParams, gains: np.ndarray, taps: Sequence[int], dopplers: np.ndarray
) -> np.ndarray:
    if params.doppler_hz == 0.0:
        return tap_channel(gains, taps, params.length_M)
    times = np.arange(params.transmissions_N) * params.transmission_gap_s
    rotated = gains[None, :] * np.exp(2j * np.pi * np.outer(times, dopplers))
    return np.stack([tap_channel(g, taps, params.length_M) for g in rotated])


def run_drop(config: ExperimentConfig, drop: int, rng: np.random.Generator) -> List[Tuple]:
    params = config.srs_mse
    target_seq = gen_sequence(params.target_root, params.length_M)
    interferer_seq = gen_sequence(params.interferer_root, params.length_M)

    gains, taps = random_taps(rng, params.target_taps, params.max_tap)
    i_gains, i_taps = random_taps(rng, params.interferer_taps, params.max_tap)
    dopplers = params.doppler_hz * np.cos(rng.uniform(0.0, 2 * np.pi, size=len(taps)))
    noise_seed, hop_seed = (int(s) for s in rng.integers(0, 2**63, size=2))

    truth = _target_response(params, gains, taps, dopplers)
    rows = []
    for inr_db in params.inr_db:
        scale = math.sqrt(10.0 ** (inr_db / 10.0) * params.noise_power)
        interferer = tap_channel(scale * i_gains, i_taps, params.length_M)
        hop_rng = np.random.default_rng(hop_seed)
        for hopping in (False, True):
            target_cs, interferer_cs = schedules(params, hopping, hop_rng)
            y = despread_rows(
                truth,
                target_seq,
                target_cs,
                interferer,
                interferer_seq,
                interferer_cs,
                params.noise_power,
                np.random.default_rng(noise_seed),
            )
            profile = accumulate_pdp([to_delay_domain(row) for row in y])
            selected = select_taps(profile, params.threshold_factor)
            estimate = estimate_channel(y, selected, truth)
            rows.append(
                (drop, int(hopping), float(inr_db), estimate.mse, tap_error_count(profile, taps))
            )
    return rows
