"""
Multi-TRP evaluation: coordination sets, SINR, throughput, uplink precoding
and DMRS port multiplexing.

Link convention: a UE's downlink matrix H (n_Rx x N*P) has rows
conj(h_r), where h_r is the per-receive-antenna channel column produced by
phy.channel. Precoders are N*P x rank and the received signal power is
||H P||_F^2, so codebook selections on the channel columns carry over
unchanged. The uplink channel from the UE is G = H^H.
"""

import itertools
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from common.errors import (
    DegenerateChannelError,
    DimensionError,
    EmptyInputError,
    ResourceError,
)
from common.logging import get_logger
from models.channel import ChannelProcess
from models.codebook import CjtConfig, EType2Config, Type1Config
from models.evaluation import (
    BurstRecord,
    DropParams,
    DropResult,
    DropScenario,
    Feedback,
    FeedbackSettings,
    OccConfig,
    OccEstimate,
    SinrScenario,
    TransmissionMode,
    UeResult,
    WeightedCsiRsPrecoder,
)
from phy.channel import process_snapshot, random_clusters
from phy.codebook import (
    cjt_compress,
    cjt_reconstruct,
    etype2_compress,
    etype2_matrix,
    type1_quantize,
)

logger = get_logger(__name__)

SE_CAP = 7.4
BURST_BITS = 0.5e6


# =============================================================================
# Coordination and classification
# =============================================================================

def coordination_set(rsrp_dbm: Sequence[float], threshold_db: float = 10.0) -> List[int]:
    """
    TRPs within threshold_db of the serving (strongest) TRP, inclusive.

    Raises:
        EmptyInputError: No TRPs
    """
    rsrp = np.asarray(rsrp_dbm, dtype=float)
    if rsrp.size == 0:
        raise EmptyInputError("coordination_set needs at least one TRP")
    serving = int(np.argmax(rsrp))
    return [n for n in range(rsrp.size) if rsrp[serving] - rsrp[n] <= threshold_db]


def rsrp_region(gap_db: float) -> int:
    """
    RSRP-gap region: 1 below 3 dB, 2 in [3, 10), 3 in [10, 15), 4 from 15 dB.

    Raises:
        ValueError: Negative gap
    """
    if gap_db < 0:
        raise ValueError(f"RSRP gap must be non-negative, got {gap_db}")
    if gap_db < 3.0:
        return 1
    if gap_db < 10.0:
        return 2
    if gap_db < 15.0:
        return 3
    return 4


# =============================================================================
# SINR, spectral efficiency, throughput
# =============================================================================

def sinr(scenario: SinrScenario) -> np.ndarray:
    """
    Per-UE linear SINR ||H_u P_u||^2 / (sum_{v != u} ||H_u P_v||^2 + n).

    In single-TRP mode precoders are zero outside their serving TRP rows; in
    CJT mode they span the stacked channel.
    """
    out = np.empty(len(scenario.channels))
    for u, h in enumerate(scenario.channels):
        powers = np.array([np.sum(np.abs(h @ p) ** 2) for p in scenario.precoders])
        interference = powers.sum() - powers[u]
        out[u] = powers[u] / (interference + scenario.noise_power)
    return out


def spectral_efficiency(value, cap: float = SE_CAP):
    """min(log2(1 + SINR), cap) elementwise."""
    return np.minimum(np.log2(1.0 + np.asarray(value, dtype=float)), cap)


def upt(bursts: Sequence[BurstRecord]) -> float:
    """User perceived throughput: sum of sizes over sum of durations.

    Raises:
        EmptyInputError: No bursts
    """
    if not bursts:
        raise EmptyInputError("upt needs at least one burst")
    return sum(b.size_bits for b in bursts) / sum(b.duration_s for b in bursts)


def stack_cjt(blocks: Sequence[np.ndarray]) -> np.ndarray:
    """Column-wise stack of per-TRP n_Rx x P channels into n_Rx x N*P."""
    rows = {np.asarray(b).shape[0] for b in blocks}
    if len(rows) != 1:
        raise DimensionError("per-TRP channels must share the receive dimension")
    return np.hstack([np.asarray(b, dtype=np.complex128) for b in blocks])


def pad_precoder(precoder: np.ndarray, trp: int, trp_count: int) -> np.ndarray:
    """Embed a P x R single-TRP precoder into the stacked N*P rows."""
    precoder = np.atleast_2d(np.asarray(precoder, dtype=np.complex128))
    p = precoder.shape[0]
    out = np.zeros((p * trp_count, precoder.shape[1]), dtype=np.complex128)
    out[trp * p:(trp + 1) * p] = precoder
    return out


def _block_norms(w: np.ndarray, trp_count: int) -> np.ndarray:
    blocks = w.reshape(trp_count, w.shape[0] // trp_count, -1)
    return np.sqrt(np.sum(np.abs(blocks) ** 2, axis=(1, 2)))


def matched_filter_precoder(
    h: np.ndarray, normalization: str = "total", trp_count: int = 1
) -> np.ndarray:
    """
    Rank-1 matched filter: dominant right singular vector of H.

    Args:
        h: n_Rx x (N * P) channel
        normalization: "total" for unit total norm, "per_trp" to scale the
            strongest TRP block to unit norm
        trp_count: N, used by per_trp normalization

    Raises:
        DegenerateChannelError: Zero channel
    """
    h = np.atleast_2d(np.asarray(h, dtype=np.complex128))
    _, s, vh = linalg.svd(h)
    if s[0] == 0.0:
        raise DegenerateChannelError("zero channel")
    w = vh[0].conj()[:, None]
    if normalization == "per_trp":
        w = w / np.max(_block_norms(w, trp_count))
    return w


def rzf_precoders(
    effective: np.ndarray,
    noise_power: float,
    trp_count: int,
    supports: Optional[Sequence[Sequence[int]]] = None,
) -> np.ndarray:
    """
    Regularized zero-forcing with per-TRP unit power.

    W = V (V^H V + noise_power I)^-1 for effective channel columns V
    (N*P x U). Each UE column is restricted to its supporting TRPs and scaled
    by 1 / (largest block norm * sqrt(U)), so every TRP radiates at most unit
    power summed over UEs.
    """
    v = np.asarray(effective, dtype=np.complex128)
    users = v.shape[1]
    gram = v.conj().T @ v + noise_power * np.eye(users)
    w = linalg.solve(gram.T, v.T).T
    block = v.shape[0] // trp_count
    for u in range(users):
        if supports is not None:
            mask = np.zeros(v.shape[0], dtype=bool)
            for n in supports[u]:
                mask[n * block:(n + 1) * block] = True
            w[~mask, u] = 0.0
        peak = np.max(_block_norms(w[:, u:u + 1], trp_count))
        w[:, u] = w[:, u] / (peak * math.sqrt(users)) if peak > 0 else 0.0
    return w


# =============================================================================
# Uplink precoding
# =============================================================================

def ul_precoder_weighted_csirs(h: np.ndarray, layers: int = 1) -> WeightedCsiRsPrecoder:
    """
    Uplink precoder from a weighted CSI-RS.

    The BS weight W_DL is the unit-norm maximizer of ||H W_DL||^2 (top right
    singular vectors of H). The UE receives y = H W_DL and uses it, normalized
    per layer, as its uplink precoder.

    Args:
        h: n_Rx x n_Tx downlink channel, n_Tx >= n_Rx
        layers: Number of layers

    Raises:
        DimensionError: n_Tx < n_Rx or too many layers
        DegenerateChannelError: Zero channel
    """
    h = np.atleast_2d(np.asarray(h, dtype=np.complex128))
    n_rx, n_tx = h.shape
    if n_tx < n_rx or layers > n_rx:
        raise DimensionError(f"need n_Tx >= n_Rx >= layers, got {n_tx}, {n_rx}, {layers}")
    _, s, vh = linalg.svd(h)
    if s[0] == 0.0:
        raise DegenerateChannelError("zero channel")
    weight = vh[:layers].conj().T
    received = h @ weight
    norms = np.linalg.norm(received, axis=0)
    precoder = received / np.where(norms > 0, norms, 1.0)
    return WeightedCsiRsPrecoder(
        weight=weight,
        received=received,
        precoder=precoder,
        gain=float(np.sum(np.abs(received) ** 2)),
    )


def coarse_ul_precoder(g: np.ndarray) -> np.ndarray:
    """
    Best co-phasing codeword [1, phi_2, ..., phi_n] / sqrt(n), phi in {1, -1, j, -j}.

    Args:
        g: Uplink channel G = H^H (n_BS x n_UE)

    Returns:
        n_UE x 1 precoder maximizing ||G p||^2 (first maximum in enumeration order)
    """
    g = np.atleast_2d(np.asarray(g, dtype=np.complex128))
    n = g.shape[1]
    alphabet = (1.0, -1.0, 1j, -1j)
    best, best_gain = None, -1.0
    for phases in itertools.product(alphabet, repeat=n - 1):
        p = np.array((1.0,) + phases, dtype=np.complex128)[:, None] / math.sqrt(n)
        gain = float(np.sum(np.abs(g @ p) ** 2))
        if gain > best_gain:
            best, best_gain = p, gain
    return best


def ul_sum_rate(
    channels: Sequence[np.ndarray], precoders: Sequence[np.ndarray], noise_power: float
) -> float:
    """
    Sum rate over all uplink streams with a linear MMSE receiver at the BS.

    SINR_k = 1 / [(I + A^H A / n)^-1]_kk - 1 for the stacked effective
    channel A = [G_1 P_1, G_2 P_2, ...].
    """
    effective = np.hstack(
        [np.asarray(g, dtype=np.complex128) @ np.asarray(p) for g, p in zip(channels, precoders)]
    )
    k = effective.shape[1]
    inverse = linalg.inv(np.eye(k) + effective.conj().T @ effective / noise_power)
    stream_sinr = 1.0 / np.real(np.diag(inverse)) - 1.0
    return float(np.sum(np.log2(1.0 + np.maximum(stream_sinr, 0.0))))


# =============================================================================
# DMRS orthogonal cover codes
# =============================================================================

_QUARTER_TURNS = (1 + 0j, -1j, -1 + 0j, 1j)


def occ_codes(length: int) -> np.ndarray:
    """
    DFT cover codes as rows, entries exactly in {1, -j, -1, j}.

    codes @ codes.conj().T == length * I.
    """
    if length not in (2, 4):
        raise ResourceError(f"OCC length must be 2 or 4, got {length}")
    step = 4 // length
    return np.array(
        [[_QUARTER_TURNS[(step * k * m) % 4] for m in range(length)] for k in range(length)],
        dtype=np.complex128,
    )


def dmrs_port_channels(
    rng: np.random.Generator,
    ports: int,
    subcarriers: int,
    delay_spreads_s: Sequence[float],
    subcarrier_spacing_hz: float = 30e3,
    taps: int = 12,
) -> List[np.ndarray]:
    """
    Per-port frequency responses with an exponential power-delay profile.

    One set of random numbers is shared by every delay spread, so channels
    for larger spreads stretch the same taps further in delay.

    Returns:
        One ports x subcarriers array per delay spread
    """
    u = rng.uniform(1e-6, 1.0, size=(ports, taps))
    gains = (rng.standard_normal((ports, taps)) + 1j * rng.standard_normal((ports, taps))) / math.sqrt(2)
    weights = np.sqrt(u / u.sum(axis=1, keepdims=True))
    s = np.arange(subcarriers)
    out = []
    for spread in delay_spreads_s:
        delays = -spread * np.log(u)
        phase = np.exp(-2j * np.pi * subcarrier_spacing_hz * delays[:, :, None] * s[None, None, :])
        out.append(np.sum((gains * weights)[:, :, None] * phase, axis=1))
    return out


def port_mapping(cfg: OccConfig, port: int) -> Tuple[int, int, int]:
    """(CDM group, frequency code, time code) for a port."""
    per_group = 2 * cfg.occ_length
    return port // per_group, (port % per_group) // 2, port % 2


def occ_port_estimation(cfg: OccConfig, channels: np.ndarray) -> OccEstimate:
    """
    Multiplex DMRS ports with frequency x time OCC, then de-cover.

    Group g uses subcarrier pairs with (s // 2) % 3 == g. Within a group,
    consecutive occ_length subcarriers form one despreading block and two
    symbols carry the length-2 time code. Channels are static over the two
    symbols. The truth for a block is the mean channel over its subcarriers.

    Args:
        cfg: OCC configuration
        channels: ports x subcarriers frequency responses (ports <= total)

    Returns:
        OccEstimate; leakage[p, q] is the power of port q's contribution in
        port p's estimate relative to q's own block power

    Raises:
        ResourceError: More ports than the configuration supports
        DimensionError: Subcarriers not a multiple of 12
    """
    channels = np.atleast_2d(np.asarray(channels, dtype=np.complex128))
    ports, subcarriers = channels.shape
    if ports > cfg.total_ports:
        raise ResourceError(f"{ports} ports exceed {cfg.total_ports} with OCC length {cfg.occ_length}")
    if subcarriers % 12 != 0:
        raise DimensionError(f"subcarriers must be a multiple of 12, got {subcarriers}")

    fd = occ_codes(cfg.occ_length)
    td = occ_codes(2)
    s = np.arange(subcarriers)
    group_subcarriers = [s[(s // 2) % cfg.cdm_groups == g] for g in range(cfg.cdm_groups)]
    blocks = group_subcarriers[0].size // cfg.occ_length
    spread = 2 * cfg.occ_length

    estimates = np.zeros((ports, blocks), dtype=np.complex128)
    truth = np.zeros((ports, blocks), dtype=np.complex128)
    contributions = np.zeros((ports, ports, blocks), dtype=np.complex128)
    mapping = [port_mapping(cfg, p) for p in range(ports)]
    for p in range(ports):
        g, f_code, t_code = mapping[p]
        sc = group_subcarriers[g][: blocks * cfg.occ_length].reshape(blocks, cfg.occ_length)
        truth[p] = channels[p, sc].mean(axis=1)
        for q in range(ports):
            gq, fq, tq = mapping[q]
            if gq != g:
                continue
            cover = np.sum(td[t_code].conj() * td[tq]) * (fd[f_code].conj() * fd[fq])
            contributions[p, q] = channels[q, sc] @ cover / spread
        estimates[p] = contributions[p].sum(axis=0)

    own = np.sum(np.abs(truth) ** 2, axis=1)
    leakage = np.zeros((ports, ports))
    for p, q in itertools.product(range(ports), repeat=2):
        if p != q and own[q] > 0:
            leakage[p, q] = np.sum(np.abs(contributions[p, q]) ** 2) / own[q]
    energy = np.sum(own)
    error = float(np.sum(np.abs(estimates - truth) ** 2) / energy) if energy > 0 else 0.0
    return OccEstimate(estimates=estimates, truth=truth, leakage=leakage, nmse=error)


# =============================================================================
# Drops
# =============================================================================

def build_drop(params: DropParams, rng: np.random.Generator) -> DropScenario:
    """
    TRPs on a line isd_m apart, UEs around the midpoint of the first pair.

    Every (UE, TRP) link gets its own clustered channel; receive antennas
    share the clusters with per-path arrival phases.
    """
    trps = [(n * params.isd_m, 0.0) for n in range(params.trp_count)]
    center = params.isd_m / 2 if params.trp_count > 1 else 0.0
    ues = []
    for _ in range(params.ue_count):
        x = center + rng.uniform(-params.ue_spread, params.ue_spread) * params.isd_m
        y = rng.choice((-1.0, 1.0)) * rng.uniform(
            params.min_distance_m, max(params.min_distance_m, params.isd_m / 4)
        )
        ues.append((float(x), float(y)))
    shadowing = rng.normal(0.0, params.shadowing_std_db, size=(params.ue_count, params.trp_count))

    links = []
    for _ in range(params.ue_count):
        row = []
        for _ in range(params.trp_count):
            paths = random_clusters(rng, params.array, params.grid)
            arrivals = rng.uniform(-np.pi, np.pi, size=len(paths))
            antennas = []
            for r in range(params.ue_antennas):
                rx_paths = [
                    path.model_copy(
                        update={"gain": complex(path.gain * np.exp(1j * np.pi * r * np.sin(arrivals[i])))}
                    )
                    for i, path in enumerate(paths)
                ]
                antennas.append(ChannelProcess(paths=rx_paths, array=params.array, grid=params.grid))
            row.append(antennas)
        links.append(row)

    return DropScenario(
        trp_positions=trps,
        ue_positions=ues,
        tx_power_dbm=params.tx_power_dbm,
        pathloss_exponent=params.pathloss_exponent,
        pathloss_ref_db=params.pathloss_ref_db,
        noise_power=params.noise_power_mw,
        shadowing_db=shadowing,
        trp_array=params.array,
        grid=params.grid,
        links=links,
    )


def rsrp_matrix(scenario: DropScenario, min_distance_m: float = 1.0) -> np.ndarray:
    """U x N received power in dBm from log-distance pathloss and shadowing."""
    ue = np.asarray(scenario.ue_positions)[:, None, :]
    trp = np.asarray(scenario.trp_positions)[None, :, :]
    distance = np.maximum(np.linalg.norm(ue - trp, axis=2), min_distance_m)
    pathloss = scenario.pathloss_ref_db + 10.0 * scenario.pathloss_exponent * np.log10(distance)
    return scenario.tx_power_dbm - pathloss - scenario.shadowing_db


def _dominant(matrix: np.ndarray) -> Tuple[np.ndarray, float]:
    values, vectors = linalg.eigh(matrix)
    return vectors[:, -1], float(values[-1])


def _align_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so the strongest row (over all columns) is real positive."""
    ref = int(np.argmax(np.sum(np.abs(vectors) ** 2, axis=1)))
    phase = np.exp(-1j * np.angle(vectors[ref]))
    return vectors * phase[None, :]


def _normalize_columns(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=0)
    return vectors / np.where(norms > 0, norms, 1.0)


def _support_rows(support: Sequence[int], block: int) -> np.ndarray:
    return np.concatenate([np.arange(n * block, (n + 1) * block) for n in support])


def _eigen_feedback(columns: List[np.ndarray], rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Per-unit dominant eigenvectors (len(rows) x F) and eigenvalues."""
    vecs, vals = [], []
    for a in columns:
        sub = a[rows]
        v, lam = _dominant(sub @ sub.conj().T)
        vecs.append(v)
        vals.append(lam)
    return _align_phase(np.stack(vecs, axis=1)), np.array(vals)


def _feedback_vectors(
    columns: List[np.ndarray],
    support: Sequence[int],
    feedback: Feedback,
    settings: FeedbackSettings,
    scenario: DropScenario,
) -> np.ndarray:
    """
    Unit-norm per-unit transmit directions (N*P x F) a UE reports.

    columns[f] is the UE's N*P x n_Rx channel-column matrix on unit f.
    """
    array = scenario.trp_array
    block = array.total_ports
    width = columns[0].shape[0]
    units = len(columns)
    out = np.zeros((width, units), dtype=np.complex128)

    if feedback == "ideal":
        rows = _support_rows(support, block)
        vecs, _ = _eigen_feedback(columns, rows)
        out[rows] = vecs
        return _normalize_columns(out)

    if feedback == "type1":
        cfg = Type1Config(
            ports=block,
            n_vertical=array.ports_vertical,
            beams_in_group=settings.type1_beams_in_group,
        )
        for n in support:
            rows = _support_rows([n], block)
            wideband = np.hstack([a[rows] for a in columns])
            result = type1_quantize(wideband, cfg)
            out[rows] = result.beamformer[:, :1] * math.sqrt(result.gain)
        if len(support) > 1:
            # Inter-TRP co-phasing on the QPSK alphabet, TRP by TRP.
            for n in support[1:]:
                rows = _support_rows([n], block)
                best, best_gain = None, -1.0
                for phase in (1.0, 1j, -1.0, -1j):
                    trial = out.copy()
                    trial[rows] *= phase
                    v = trial[:, 0]
                    gain = sum(float(np.sum(np.abs(a.conj().T @ v) ** 2)) for a in columns)
                    if gain > best_gain:
                        best, best_gain = phase, gain
                out[rows] *= best
        return _normalize_columns(out)

    beams = min(settings.beams_L, block // 2)
    delay_dim = min(settings.delay_dim_Z, units)
    et_cfg = EType2Config(
        ports=block,
        n_vertical=array.ports_vertical,
        beams_L=beams,
        freq_units_F=units,
        delay_dim_Z=delay_dim,
        top_K=min(settings.top_K, 2 * beams * delay_dim),
        quantizer=settings.quantizer,
    )
    if feedback == "etype2" or len(support) == 1:
        for n in support:
            rows = _support_rows([n], block)
            vecs, vals = _eigen_feedback(columns, rows)
            report = etype2_compress(vecs, et_cfg)
            out[rows] = _normalize_columns(etype2_matrix(report)) * np.sqrt(vals)[None, :]
        return _normalize_columns(out)

    count = len(support)
    cjt_cfg = CjtConfig(
        trp_count=count,
        ports_per_trp=block,
        n_vertical=array.ports_vertical,
        per_trp_beams=[et_cfg.beams_L] * count,
        per_trp_freq=[et_cfg.delay_dim] * count,
        per_trp_topK=[et_cfg.top_K] * count,
        joint_frequency_basis=settings.joint_frequency_basis,
        quantizer=settings.quantizer,
    )
    rows = _support_rows(support, block)
    vecs, _ = _eigen_feedback(columns, rows)
    out[rows] = cjt_reconstruct(cjt_compress(vecs, cjt_cfg))
    return _normalize_columns(out)


def run_drop(
    scenario: DropScenario,
    feedback: Feedback = "ideal",
    mode: TransmissionMode = "cjt",
    settings: Optional[FeedbackSettings] = None,
    slot: int = 0,
    threshold_db: float = 10.0,
    burst_bits: float = BURST_BITS,
    bursts_per_ue: int = 1,
) -> DropResult:
    """
    Evaluate one drop for a feedback scheme and transmission mode.

    1. RSRP, serving TRP, coordination set (CJT mode) and RSRP region.
    2. Per-unit transmit directions from ideal eigenvectors or a codebook.
    3. Regularized ZF per frequency unit: per serving TRP in single-TRP mode,
       jointly over all TRPs in CJT mode.
    4. SINR per unit, spectral efficiency and UPT of 0.5 Mb bursts at the
       achieved rate over the grid bandwidth.

    Args:
        scenario: Drop geometry and links
        feedback: ideal, type1, etype2 or cjt_codebook
        mode: single_trp or cjt
        settings: Codebook parameters (defaults to FeedbackSettings())
        slot: Slot at which the channels are evaluated
        threshold_db: Coordination-set threshold
        burst_bits: Burst size for UPT
        bursts_per_ue: Bursts delivered per UE

    Returns:
        DropResult with one UeResult per UE
    """
    settings = settings or FeedbackSettings()
    users = len(scenario.ue_positions)
    trp_count = len(scenario.trp_positions)
    block = scenario.trp_array.total_ports
    units = scenario.grid.units

    rsrp = rsrp_matrix(scenario)
    gain = 10.0 ** (rsrp / 10.0)
    serving = [int(np.argmax(rsrp[u])) for u in range(users)]
    supports, regions = [], []
    for u in range(users):
        cset = coordination_set(rsrp[u], threshold_db) if mode == "cjt" else [serving[u]]
        supports.append(cset)
        others = np.delete(rsrp[u], serving[u])
        gap = float(rsrp[u, serving[u]] - others.max()) if others.size else math.inf
        regions.append(rsrp_region(gap))

    # columns[u][f]: N*P x n_Rx channel columns with large-scale gain applied
    columns = []
    for u in range(users):
        per_trp = []
        for n in range(trp_count):
            mats = [process_snapshot(link, slot).matrix for link in scenario.links[u][n]]
            per_trp.append(math.sqrt(gain[u, n]) * np.stack(mats, axis=2))
        stacked = np.concatenate(per_trp, axis=0)
        columns.append([stacked[:, f, :] for f in range(units)])

    directions = [
        _feedback_vectors(columns[u], supports[u], feedback, settings, scenario)
        for u in range(users)
    ]

    if mode == "cjt":
        groups = {0: list(range(users))}
    else:
        groups: Dict[int, List[int]] = {}
        for u in range(users):
            groups.setdefault(serving[u], []).append(u)

    sinr_units = np.zeros((users, units))
    for f in range(units):
        precoders = [None] * users
        for members in groups.values():
            effective = np.stack(
                [
                    directions[u][:, f]
                    * np.linalg.norm(columns[u][f].conj().T @ directions[u][:, f])
                    for u in members
                ],
                axis=1,
            )
            w = rzf_precoders(
                effective, scenario.noise_power, trp_count, [supports[u] for u in members]
            )
            for i, u in enumerate(members):
                precoders[u] = w[:, i:i + 1]
        sinr_units[:, f] = sinr(
            SinrScenario(
                channels=[columns[u][f].conj().T for u in range(users)],
                precoders=precoders,
                noise_power=scenario.noise_power,
                mode=mode,
                trp_count=trp_count,
            )
        )

    bandwidth = units * scenario.grid.unit_spacing_hz
    results = []
    for u in range(users):
        mean_sinr = float(np.mean(sinr_units[u]))
        se = float(np.mean(spectral_efficiency(sinr_units[u])))
        rate = se * bandwidth
        throughput = (
            upt([BurstRecord(size_bits=burst_bits, duration_s=burst_bits / rate)] * bursts_per_ue)
            if rate > 0
            else 0.0
        )
        results.append(
            UeResult(
                ue=u,
                mode=mode,
                feedback=feedback,
                serving_trp=serving[u],
                coordination_set=tuple(supports[u]),
                region=regions[u],
                sinr=mean_sinr,
                sinr_db=10.0 * math.log10(mean_sinr) if mean_sinr > 0 else -math.inf,
                se=se,
                upt_bps=throughput,
            )
        )
    logger.debug(
        "drop_evaluated",
        mode=mode,
        feedback=feedback,
        users=users,
        mean_se=float(np.mean([r.se for r in results])),
    )
    return DropResult(mode=mode, feedback=feedback, ues=results)
