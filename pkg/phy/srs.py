"""
Uplink SRS chain.

Sequence generation, cyclic shifts, interference-corrupted reception,
despreading, delay-domain power profiles, tap selection and channel
estimation, plus the antenna-switching / hopping / partial-SRS schedule.

Delay-domain convention: to_delay_domain is the inverse DFT. A physical
delay of k taps (h[m] = exp(-j 2 pi m k / M)) lands on tap k. A residual
cyclic shift exp(+j dalpha m) left after despreading lands on tap -k with
k = M dalpha / 2pi, so an interferer whose CS differs by dalpha appears
shifted away from the target taps.
"""

import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import fft

from common.errors import DegenerateChannelError, DimensionError, EmptyInputError, ResourceError
from common.logging import get_logger
from models.srs import (
    TWO_PI,
    ChannelEstimate,
    CsSchedule,
    DelayProfile,
    SrsAssignment,
    SrsObservation,
    SrsResourceMap,
    SrsSequence,
)

logger = get_logger(__name__)

DISCRETE_CS_LEVELS = 12

# Taps weaker than this fraction of the peak are transform round-off.
NUMERICAL_FLOOR = 1e-12


# =============================================================================
# Sequences and cyclic shifts
# =============================================================================

def largest_prime_at_most(n: int) -> int:
    """Largest prime <= n (n >= 2)."""
    if n < 2:
        raise ResourceError(f"no prime at most {n}")
    for candidate in range(n, 1, -1):
        if all(candidate % d for d in range(2, math.isqrt(candidate) + 1)):
            return candidate
    return 2


def gen_sequence(root: int, length: int) -> SrsSequence:
    """
    Constant-amplitude zero-autocorrelation root sequence.

    x(m) = exp(-j pi q m (m + 1) / N) on the largest prime N <= length,
    cyclically extended to the allocation.

    Args:
        root: Root index q, 1 <= q < N
        length: Allocated subcarriers M (>= 3)

    Returns:
        SrsSequence with unit-modulus values

    Raises:
        ResourceError: Root outside [1, N) or allocation too short
    """
    if length < 3:
        raise ResourceError(f"allocation of {length} subcarriers is too short")
    prime = largest_prime_at_most(length)
    if not 1 <= root < prime:
        raise ResourceError(f"root {root} outside [1, {prime})")
    m = np.arange(prime)
    base = np.exp(-1j * np.pi * root * m * (m + 1) / prime)
    values = base[np.arange(length) % prime]
    return SrsSequence(root=root, length=length, values=values, prime_length=prime)


def apply_cs(seq: SrsSequence, alpha: float) -> SrsSequence:
    """Multiply element m by exp(j alpha m)."""
    if not 0.0 <= alpha < TWO_PI:
        raise ResourceError(f"cyclic shift {alpha} outside [0, 2*pi)")
    m = np.arange(seq.length)
    return seq.model_copy(
        update={
            "values": seq.values * np.exp(1j * alpha * m),
            "cyclic_shift": math.fmod(seq.cyclic_shift + alpha, TWO_PI),
        }
    )


def cs_schedule(
    count: int,
    mode: str = "hopping",
    rng: Optional[np.random.Generator] = None,
    grid: str = "continuous",
    fixed_value: float = 0.0,
) -> CsSchedule:
    """
    Cyclic shifts for `count` transmissions.

    Hopping draws each alpha_n independently and uniformly, either on
    [0, 2 pi) or on the 12-level grid 2 pi k / 12.
    """
    if mode == "fixed":
        return CsSchedule(values=(float(fixed_value),) * count, mode="fixed", grid=grid)
    if rng is None:
        raise ResourceError("hopping cyclic shifts need a random generator")
    if grid == "discrete12":
        values = rng.integers(0, DISCRETE_CS_LEVELS, size=count) * (TWO_PI / DISCRETE_CS_LEVELS)
    else:
        values = rng.uniform(0.0, TWO_PI, size=count)
    return CsSchedule(values=tuple(float(v) for v in values), mode="hopping", grid=grid)


# =============================================================================
# Reception and delay-domain processing
# =============================================================================

def receive(
    target: np.ndarray,
    target_seq: SrsSequence,
    interferers: Sequence[Tuple[np.ndarray, SrsSequence]] = (),
    noise_power: float = 0.0,
    rng: Optional[np.random.Generator] = None,
    transmission_index: int = 0,
) -> SrsObservation:
    """
    y(m) = r(m) h(m) + sum_i r_i(m) h_i(m) + w(m).

    Raises:
        DimensionError: Channel and sequence lengths differ
    """
    h = np.asarray(target, dtype=np.complex128)
    if h.shape != (target_seq.length,):
        raise DimensionError(f"channel length {h.shape} does not match sequence {target_seq.length}")
    y = target_seq.values * h
    for h_i, seq_i in interferers:
        h_i = np.asarray(h_i, dtype=np.complex128)
        if h_i.shape != h.shape or seq_i.length != target_seq.length:
            raise DimensionError("interferer length does not match the target")
        y = y + seq_i.values * h_i
    if noise_power > 0.0:
        if rng is None:
            raise ResourceError("noisy reception needs a random generator")
        scale = math.sqrt(noise_power / 2.0)
        y = y + scale * (rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape))
    return SrsObservation(y=y, transmission_index=transmission_index)


def despread(obs: Union[SrsObservation, np.ndarray], seq: SrsSequence) -> np.ndarray:
    """y(m) conj(r(m))."""
    y = obs.y if isinstance(obs, SrsObservation) else np.asarray(obs, dtype=np.complex128)
    if y.shape != (seq.length,):
        raise DimensionError(f"observation length {y.shape} does not match sequence {seq.length}")
    return y * np.conj(seq.values)


def to_delay_domain(y_tilde: np.ndarray) -> np.ndarray:
    """Inverse DFT to the delay domain."""
    return fft.ifft(np.asarray(y_tilde, dtype=np.complex128))


def accumulate_pdp(delay_vectors: Sequence[np.ndarray]) -> DelayProfile:
    """
    Time-averaged power-delay profile over N transmissions.

    The noise floor estimate is the median tap power.

    Raises:
        EmptyInputError: No transmissions
    """
    if len(delay_vectors) == 0:
        raise EmptyInputError("accumulate_pdp needs at least one transmission")
    stacked = np.asarray(delay_vectors, dtype=np.complex128)
    if stacked.ndim == 1:
        stacked = stacked[None, :]
    pdp = np.mean(np.abs(stacked) ** 2, axis=0)
    return DelayProfile(
        pdp=pdp,
        transmissions_accumulated=stacked.shape[0],
        noise_floor_estimate=float(np.median(pdp)),
    )


def select_taps(
    profile: DelayProfile, threshold_factor: float = 3.0, max_taps: Optional[int] = None
) -> List[int]:
    """Taps above threshold_factor x noise floor, strongest max_taps kept, sorted."""
    pdp = profile.pdp
    threshold = max(
        threshold_factor * profile.noise_floor_estimate,
        NUMERICAL_FLOOR * float(np.max(pdp, initial=0.0)),
    )
    above = np.flatnonzero(pdp > threshold)
    if max_taps is not None and above.size > max_taps:
        order = np.argsort(-pdp[above], kind="stable")
        above = above[order[:max_taps]]
    return sorted(int(t) for t in above)


def tap_error_count(profile: DelayProfile, true_taps: Sequence[int]) -> int:
    """True taps missing among the len(true_taps) strongest PDP taps."""
    strongest = set(np.argsort(-profile.pdp, kind="stable")[: len(true_taps)].tolist())
    return sum(1 for t in true_taps if t not in strongest)


def estimate_channel(
    despread_rows: np.ndarray, taps: Sequence[int], truth: np.ndarray
) -> ChannelEstimate:
    """
    Masked delay-domain estimation with normalized squared error.

    Each transmission is taken to the delay domain, zeroed outside `taps`
    and transformed back. The error is sum |h_hat - h|^2 / sum |h|^2 per
    transmission.

    Args:
        despread_rows: N x M despread sequences
        taps: Selected delay taps in [0, M)
        truth: True channel, length M (static) or N x M

    Returns:
        ChannelEstimate with per-transmission and mean error

    Raises:
        DimensionError: Taps out of range or mismatched shapes
        DegenerateChannelError: Zero-energy true channel
    """
    rows = np.atleast_2d(np.asarray(despread_rows, dtype=np.complex128))
    count, length = rows.shape
    truth = np.asarray(truth, dtype=np.complex128)
    truth = np.broadcast_to(truth, rows.shape) if truth.ndim == 1 else truth
    if truth.shape != rows.shape:
        raise DimensionError(f"truth shape {truth.shape} does not match {rows.shape}")
    taps = list(taps)
    if any(t < 0 or t >= length for t in taps):
        raise DimensionError(f"taps must lie in [0, {length})")

    mask = np.zeros(length, dtype=bool)
    mask[taps] = True
    delay = fft.ifft(rows, axis=1)
    estimates = fft.fft(np.where(mask, delay, 0.0), axis=1)

    energy = np.sum(np.abs(truth) ** 2, axis=1)
    if np.any(energy == 0.0):
        raise DegenerateChannelError("zero-energy channel")
    per_tx = np.sum(np.abs(estimates - truth) ** 2, axis=1) / energy
    return ChannelEstimate(
        estimates=estimates,
        per_transmission_mse=tuple(float(v) for v in per_tx),
        mse=float(np.mean(per_tx)),
    )


def tap_channel(
    gains: Sequence[complex], taps: Sequence[int], length: int
) -> np.ndarray:
    """On-grid multi-tap channel h[m] = sum_l g_l exp(-j 2 pi m k_l / M)."""
    m = np.arange(length)[:, None]
    k = np.asarray(taps, dtype=float)[None, :]
    return np.exp(-2j * np.pi * m * k / length) @ np.asarray(gains, dtype=np.complex128)


def random_taps(
    rng: np.random.Generator, count: int, max_tap: int
) -> Tuple[np.ndarray, List[int]]:
    """Rayleigh gains (unit total power) on `count` distinct taps below max_tap."""
    taps = sorted(int(t) for t in rng.choice(max_tap, size=count, replace=False))
    gains = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / math.sqrt(2 * count)
    return gains, taps


# =============================================================================
# Resource schedule
# =============================================================================

def resource_schedule(cfg: SrsResourceMap, ue: int = 0) -> List[SrsAssignment]:
    """
    Assignments for one UE over partial-SRS rounds, hops and symbols.

    Symbol s sounds ports [s * tx_chains, (s + 1) * tx_chains). Hop h covers
    subband h of hop_count. With partial factor k each hop bandwidth is split
    in k parts and the UE sounds part (ue + round) mod k, so k rounds cover
    the whole band while k UEs share every hop.
    """
    hop_width = cfg.band_subcarriers // cfg.hop_count
    part_width = hop_width // cfg.partial_factor
    assignments = []
    for rnd in range(cfg.partial_factor):
        part = (ue + rnd) % cfg.partial_factor
        for hop in range(cfg.hop_count):
            start = hop * hop_width + part * part_width
            for symbol in range(cfg.symbols):
                ports = tuple(
                    range(symbol * cfg.tx_chains, min((symbol + 1) * cfg.tx_chains, cfg.ports))
                )
                if not ports:
                    continue
                assignments.append(
                    SrsAssignment(
                        ue=ue,
                        round=rnd,
                        hop=hop,
                        symbol=symbol,
                        ports=ports,
                        start=start,
                        stop=start + part_width,
                    )
                )
    return assignments


def schedule_ues(cfg: SrsResourceMap, ue_count: int) -> Dict[int, List[SrsAssignment]]:
    """
    Schedules for ue_count UEs sharing the same resources.

    Raises:
        ResourceError: More UEs than the partial factor accommodates
    """
    if ue_count > cfg.partial_factor:
        raise ResourceError(
            f"{ue_count} UEs exceed partial factor {cfg.partial_factor} per hop bandwidth"
        )
    schedules = {ue: resource_schedule(cfg, ue) for ue in range(ue_count)}
    logger.debug("srs_scheduled", ue_count=ue_count, assignments=len(schedules[0]) if schedules else 0)
    return schedules


def assemble_channel(
    assignments: Sequence[SrsAssignment],
    channel: np.ndarray,
    observe=None,
) -> np.ndarray:
    """
    Full-band per-port channel assembled from scheduled soundings.

    Args:
        assignments: One UE's schedule
        channel: ports x band true channel
        observe: Optional callable(assignment, true_slice) -> estimate; defaults
            to the noiseless observation

    Raises:
        ResourceError: Some (port, subcarrier) entry is never sounded
    """
    channel = np.asarray(channel, dtype=np.complex128)
    assembled = np.zeros_like(channel)
    covered = np.zeros(channel.shape, dtype=bool)
    for a in assignments:
        rows = list(a.ports)
        true_slice = channel[rows, a.start:a.stop]
        assembled[rows, a.start:a.stop] = true_slice if observe is None else observe(a, true_slice)
        covered[rows, a.start:a.stop] = True
    if not covered.all():
        raise ResourceError(f"{int((~covered).sum())} port/subcarrier entries never sounded")
    return assembled
