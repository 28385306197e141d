"""
Beam tracking under DCI / MAC-CE beam indication.

The UE moves along a polyline; every sub-step the best beam over the union
of all TRP grids is the ideal beam. When it differs from the applied beam an
indication is sent; each attempt fails with probability bler and is retried
one latency period later, and a successful indication takes effect after the
latency plus the application delay.
"""

import math
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from common.errors import EmptyInputError
from common.logging import get_logger
from models.beams import (
    BeamGrid,
    BeamSample,
    BeamScenario,
    EmpiricalCdf,
    IndicationModel,
    Trajectory,
)

logger = get_logger(__name__)

# 10 log10(exp(-4 ln2 x^2)) = -GAUSSIAN_DB x^2, so x = 1/2 is the half-power point.
GAUSSIAN_DB = 40.0 * math.log(2.0) / math.log(10.0)

# Gains are compared after rounding so mirror-symmetric ties resolve to the lower index.
TIE_DECIMALS = 9


def _wrap(angle: np.ndarray) -> np.ndarray:
    return (angle + np.pi) % (2 * np.pi) - np.pi


def beam_gain_db(grid: BeamGrid, angle) -> np.ndarray:
    """
    Gaussian main-lobe gain of every beam toward `angle` (radians).

    Returns an array of shape angle.shape + (beam_count,), floored at the
    sidelobe level below peak.
    """
    offset = _wrap(np.asarray(angle, dtype=float)[..., None] - np.asarray(grid.beam_centers))
    relative = np.maximum(-GAUSSIAN_DB * (offset / grid.beamwidth) ** 2, grid.sidelobe_floor_db)
    return grid.peak_gain_db + relative


def direction(grid: BeamGrid, position) -> np.ndarray:
    """Angle from the TRP toward position(s)."""
    pos = np.asarray(position, dtype=float)
    return np.arctan2(pos[..., 1] - grid.trp_position[1], pos[..., 0] - grid.trp_position[0])


def best_beam(position: Tuple[float, float], grid: BeamGrid) -> int:
    """Beam with the largest gain toward position; ties go to the lowest index."""
    gains = np.round(beam_gain_db(grid, direction(grid, position)), TIE_DECIMALS)
    return int(np.argmax(gains))


def received_power_dbm(scenario: BeamScenario, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Received power of every beam in the grid union.

    Returns:
        (power, owner): power is len(positions) x total beams in dBm, owner maps
        each global beam index to its grid
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    powers, owner = [], []
    for g, grid in enumerate(scenario.grids):
        distance = np.hypot(
            positions[:, 0] - grid.trp_position[0], positions[:, 1] - grid.trp_position[1]
        )
        pathloss = scenario.pathloss_ref_db + 10.0 * scenario.pathloss_exponent * np.log10(
            np.maximum(distance, 1.0)
        )
        gain = beam_gain_db(grid, direction(grid, positions))
        powers.append(
            scenario.tx_power_dbm + gain - (pathloss + scenario.penetration_loss_db)[:, None]
        )
        owner.extend([g] * grid.beam_count)
    return np.hstack(powers), np.asarray(owner)


def best_beam_in_union(scenario: BeamScenario, position: Tuple[float, float]) -> int:
    """Global index of the strongest received beam over all TRP grids."""
    power, _ = received_power_dbm(scenario, np.asarray([position]))
    return int(np.argmax(np.round(power[0], TIE_DECIMALS)))


def trajectory_positions(traj: Trajectory, distances: np.ndarray) -> np.ndarray:
    """Points at the given distances along the polyline (clamped to its ends)."""
    points = np.asarray(traj.waypoints, dtype=float)
    cumulative = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(points, axis=0).T))])
    return np.stack(
        [np.interp(distances, cumulative, points[:, 0]), np.interp(distances, cumulative, points[:, 1])],
        axis=1,
    )


def _steps(seconds: float, dt: float) -> float:
    if math.isinf(seconds):
        return math.inf
    return math.ceil(seconds / dt - 1e-9)


def simulate(
    scenario: BeamScenario, model: IndicationModel, seed: int = 0
) -> List[BeamSample]:
    """
    Run the beam-indication event loop and report one sample per trajectory point.

    Sub-steps of scenario.substep_s are averaged into each sample interval.
    Indication outcomes and interfering beams come from independent streams
    of the same seed, so runs that differ only in the indication model see
    the same interference.

    Args:
        scenario: Trajectory, grids and link budget
        model: Indication latency, BLER and application delay
        seed: Seed for indication failures and interfering beams

    Returns:
        BeamSample per trajectory sample
    """
    traj = scenario.trajectory
    dt = scenario.substep_s
    interval = traj.sample_interval_s
    steps = int(math.ceil(traj.duration_s / dt - 1e-9)) + 1
    times = np.arange(steps) * dt
    positions = trajectory_positions(traj, np.minimum(times * traj.speed_mps, traj.duration_s * traj.speed_mps))
    power, owner = received_power_dbm(scenario, positions)
    ideal = np.argmax(np.round(power, TIE_DECIMALS), axis=1)

    indication_seed, interference_seed = np.random.SeedSequence(seed).spawn(2)
    indication_rng = np.random.default_rng(indication_seed)
    interference_rng = np.random.default_rng(interference_seed)

    latency = _steps(model.latency_s, dt)
    application = _steps(model.application_delay_s, dt)
    log_bler = math.log(model.bler) if model.bler > 0 else None

    applied = np.empty(steps, dtype=int)
    issued = np.zeros(steps, dtype=bool)
    current = int(ideal[0])
    pending = None
    for i in range(steps):
        if pending is None and ideal[i] != current:
            u = 1.0 - indication_rng.random()
            failures = 0 if log_bler is None else int(math.floor(math.log(u) / log_bler))
            pending = (int(ideal[i]), i + (failures + 1) * latency + application)
            issued[i] = True
        if pending is not None and i >= pending[1]:
            current = pending[0]
            pending = None
        applied[i] = current

    noise = 10.0 ** (scenario.noise_power_dbm / 10.0)
    linear = 10.0 ** (power / 10.0)
    signal = linear[np.arange(steps), applied]
    interference = np.zeros(steps)
    if scenario.interference and len(scenario.grids) > 1:
        offsets = np.concatenate([[0], np.cumsum([g.beam_count for g in scenario.grids])])
        for g, grid in enumerate(scenario.grids):
            beams = offsets[g] + interference_rng.integers(0, grid.beam_count, size=steps)
            active = owner[applied] != g
            interference += np.where(active, linear[np.arange(steps), beams], 0.0)
    sinr = signal / (interference + noise)
    se = np.minimum(np.log2(1.0 + sinr), scenario.se_cap)

    sample_of = np.minimum(np.floor(times / interval + 1e-9).astype(int), traj.sample_count - 1)
    counts = np.bincount(sample_of, minlength=traj.sample_count)
    mean_sinr = np.bincount(sample_of, weights=sinr, minlength=traj.sample_count) / counts
    mean_se = np.bincount(sample_of, weights=se, minlength=traj.sample_count) / counts
    first = np.searchsorted(sample_of, np.arange(traj.sample_count))

    samples = []
    for k in range(traj.sample_count):
        in_sample = np.flatnonzero((sample_of == k) & issued)
        indication = (
            10.0 * math.log10(sinr[in_sample[-1]]) if in_sample.size else math.nan
        )
        samples.append(
            BeamSample(
                sample_index=k,
                position_m=k * traj.sample_spacing_m,
                serving_beam=int(applied[first[k]]),
                ideal_beam=int(ideal[first[k]]),
                sinr_db=float(10.0 * np.log10(mean_sinr[k])),
                se=float(mean_se[k]),
                indication_sinr_db=indication,
            )
        )
    logger.debug(
        "beam_simulation_completed",
        scenario=scenario.name,
        mechanism=model.mechanism,
        indications=int(issued.sum()),
        mean_se=float(np.mean(mean_se)),
    )
    return samples


def cdf(samples: Sequence[float]) -> EmpiricalCdf:
    """
    Empirical CDF of scalar samples.

    Raises:
        EmptyInputError: No samples
    """
    values = np.sort(np.asarray(samples, dtype=float))
    if values.size == 0:
        raise EmptyInputError("cdf needs at least one sample")
    probabilities = np.arange(1, values.size + 1) / values.size
    return EmpiricalCdf(values=values, probabilities=probabilities)


# =============================================================================
# Presets
# =============================================================================

def duh_scenario(sample_count: int = 100) -> BeamScenario:
    """Drive-by past a roadside TRP 15 m from the lane, closest at the middle sample."""
    trajectory = Trajectory(waypoints=[(0.0, 0.0), (200.0, 0.0)], sample_count=sample_count)
    apex = (sample_count - 1) * trajectory.sample_spacing_m / 2
    grid = BeamGrid.uniform(
        trp_position=(apex, 15.0),
        beam_count=48,
        sector_center=-math.pi / 2,
        sector_width=math.radians(160.0),
    )
    return BeamScenario(
        name="duh",
        trajectory=trajectory,
        grids=[grid],
        tx_power_dbm=23.0,
        penetration_loss_db=35.0,
    )


def hst_scenario(sample_count: int = 100) -> BeamScenario:
    """Train passing three trackside RRHs 50 m apart, 10 m from the rail."""
    trajectory = Trajectory(waypoints=[(0.0, 0.0), (300.0, 0.0)], sample_count=sample_count)
    grids = [
        BeamGrid.uniform(
            trp_position=(x, 10.0),
            beam_count=32,
            sector_center=-math.pi / 2,
            sector_width=math.radians(160.0),
        )
        for x in (0.0, 50.0, 100.0)
    ]
    return BeamScenario(
        name="hst",
        trajectory=trajectory,
        grids=grids,
        tx_power_dbm=23.0,
        penetration_loss_db=30.0,
        interference=True,
    )


PRESETS: Dict[str, Callable[..., BeamScenario]] = {
    "duh": duh_scenario,
    "hst": hst_scenario,
}


def preset(name: str, sample_count: int = 100) -> BeamScenario:
    """Named scenario preset ("duh" or "hst")."""
    try:
        return PRESETS[name](sample_count)
    except KeyError:
        raise KeyError(f"unknown beam scenario preset '{name}' (known: {', '.join(PRESETS)})") from None


def mechanism_model(mechanism: str, application_delay_s: float = 0.0) -> IndicationModel:
    """
    Default indication model for DCI or MAC_CE.

    Raises:
        ValueError: Unknown mechanism name
    """
    if mechanism == "DCI":
        return IndicationModel.dci(application_delay_s)
    if mechanism == "MAC_CE":
        return IndicationModel.mac_ce(application_delay_s)
    raise ValueError(f"unknown indication mechanism '{mechanism}' (known: DCI, MAC_CE)")
