"""
CJT evaluation Pydantic models.

Drop geometry, SINR inputs, throughput bursts, DMRS port multiplexing and the
per-UE results of a drop.
"""

from typing import List, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import frozen_array
from .channel import ArrayConfig, ChannelProcess, FrequencyGrid


Feedback = Literal["ideal", "type1", "etype2", "cjt_codebook"]
TransmissionMode = Literal["single_trp", "cjt"]

MAX_DMRS_PORTS = 24


class DropParams(BaseModel):
    """Geometry and link-budget settings for building a drop."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    trp_count: int = Field(default=2, ge=1)
    ue_count: int = Field(default=2, ge=1)
    ue_antennas: int = Field(default=2, ge=1)
    isd_m: float = Field(default=200.0, gt=0, description="Distance between adjacent TRPs")
    ue_spread: float = Field(
        default=0.4, gt=0, le=0.5, description="UE x offset from the midpoint, fraction of isd"
    )
    tx_power_dbm: float = Field(default=46.0)
    pathloss_exponent: float = Field(default=3.7, gt=0)
    pathloss_ref_db: float = Field(default=43.3)
    shadowing_std_db: float = Field(default=4.0, ge=0)
    bandwidth_hz: float = Field(default=20e6, gt=0)
    noise_figure_db: float = Field(default=9.0)
    min_distance_m: float = Field(default=10.0, gt=0)
    array: ArrayConfig = Field(
        default_factory=lambda: ArrayConfig(ports_horizontal=4, polarizations=2)
    )
    grid: FrequencyGrid = Field(default_factory=FrequencyGrid)

    @property
    def noise_power_mw(self) -> float:
        """Thermal noise over the bandwidth plus noise figure, in mW."""
        dbm = -174.0 + 10.0 * np.log10(self.bandwidth_hz) + self.noise_figure_db
        return float(10.0 ** (dbm / 10.0))


class FeedbackSettings(BaseModel):
    """Codebook parameters used when a drop runs with codebook feedback."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    beams_L: int = Field(default=2, ge=1)
    delay_dim_Z: int = Field(default=4, ge=1)
    top_K: int = Field(default=12, ge=1, description="Coefficients per TRP (etype2 / cjt)")
    quantizer: Literal["none", "amp8-psk16"] = Field(default="amp8-psk16")
    type1_beams_in_group: Literal[1, 4] = Field(default=1)
    joint_frequency_basis: bool = Field(default=False)


class DropScenario(BaseModel):
    """TRP/UE geometry with per-link channels.

    links[u][n][r] is the channel from TRP n to receive antenna r of UE u,
    normalized to unit average power; large-scale gain is applied separately.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    trp_positions: List[Tuple[float, float]] = Field(min_length=1)
    ue_positions: List[Tuple[float, float]] = Field(min_length=1)
    tx_power_dbm: float = Field(default=46.0, description="Per-TRP transmit power")
    pathloss_exponent: float = Field(default=3.7, gt=0)
    pathloss_ref_db: float = Field(default=43.3, description="Pathloss at 1 m")
    noise_power: float = Field(gt=0, description="Noise power n in mW")
    shadowing_db: np.ndarray = Field(description="U x N log-normal shadowing")
    trp_array: ArrayConfig
    grid: FrequencyGrid
    links: List[List[List[ChannelProcess]]]

    @field_validator("shadowing_db", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return frozen_array(value, dtype=np.float64, ndim=2, name="shadowing_db")

    @model_validator(mode="after")
    def _shapes(self) -> "DropScenario":
        u, n = len(self.ue_positions), len(self.trp_positions)
        if self.shadowing_db.shape != (u, n):
            raise ValueError(f"shadowing_db shape {self.shadowing_db.shape} != ({u}, {n})")
        if len(self.links) != u or any(len(row) != n for row in self.links):
            raise ValueError("links must be indexed [ue][trp][rx]")
        return self

    @property
    def ue_antennas(self) -> int:
        return len(self.links[0][0])


class SinrScenario(BaseModel):
    """Channels and precoders for the per-UE SINR evaluation.

    channels[u] is n_Rx x (N * n_Tx); precoders[u] is (N * n_Tx) x R_u. A
    single-TRP precoder is zero outside its serving TRP's rows.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    channels: List[np.ndarray] = Field(min_length=1)
    precoders: List[np.ndarray] = Field(min_length=1)
    noise_power: float = Field(gt=0)
    mode: TransmissionMode = Field(default="single_trp")
    trp_count: int = Field(default=1, ge=1)

    @field_validator("channels", "precoders", mode="before")
    @classmethod
    def _as_matrices(cls, value, info):
        return [frozen_array(m, ndim=2, name=info.field_name) for m in value]

    @model_validator(mode="after")
    def _dimensions(self) -> "SinrScenario":
        if len(self.channels) != len(self.precoders):
            raise ValueError("channels and precoders must list the same UEs")
        width = self.channels[0].shape[1]
        if width % self.trp_count != 0:
            raise ValueError(f"channel width {width} not divisible by trp_count")
        block = width // self.trp_count
        for u, (h, p) in enumerate(zip(self.channels, self.precoders)):
            if h.shape[1] != width or p.shape[0] != width:
                raise ValueError(f"UE {u}: channel/precoder width mismatch")
            if p.shape[1] > min(h.shape[0], width):
                raise ValueError(f"UE {u}: rank {p.shape[1]} exceeds channel dimensions")
            blocks = p.reshape(self.trp_count, block, p.shape[1])
            norms = np.sqrt(np.sum(np.abs(blocks) ** 2, axis=1))
            if np.any(norms > 1.0 + 1e-9):
                raise ValueError(f"UE {u}: precoder exceeds unit power on a TRP")
        return self


class BurstRecord(BaseModel):
    """One delivered data burst."""

    model_config = ConfigDict(frozen=True)

    size_bits: float = Field(gt=0)
    duration_s: float = Field(gt=0)


class OccConfig(BaseModel):
    """DMRS port multiplexing with frequency-domain OCC of length 2 or 4."""

    model_config = ConfigDict(frozen=True)

    occ_length: Literal[2, 4] = Field(default=2)
    base_ports: int = Field(default=12, ge=4, description="Ports with length-2 OCC")
    cdm_groups: int = Field(default=3, ge=1)

    @property
    def total_ports(self) -> int:
        return self.base_ports * self.occ_length // 2

    @property
    def ports_per_group(self) -> int:
        return self.total_ports // self.cdm_groups

    @model_validator(mode="after")
    def _ports(self) -> "OccConfig":
        if self.total_ports > MAX_DMRS_PORTS:
            raise ValueError(f"{self.total_ports} ports exceed the {MAX_DMRS_PORTS}-port limit")
        if self.total_ports % (self.cdm_groups * 2 * self.occ_length) != 0:
            raise ValueError("ports must fill whole CDM groups (frequency x time OCC)")
        return self


class OccEstimate(BaseModel):
    """De-covered per-port channel estimates and cross-port leakage."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    estimates: np.ndarray = Field(description="ports x despreading blocks")
    truth: np.ndarray = Field(description="Block-averaged true channels, same shape")
    leakage: np.ndarray = Field(description="ports x ports, [p, q] = power of q leaking into p")
    nmse: float = Field(ge=0)

    @field_validator("estimates", "truth", "leakage", mode="before")
    @classmethod
    def _as_array(cls, value, info):
        dtype = np.float64 if info.field_name == "leakage" else np.complex128
        return frozen_array(value, dtype=dtype, ndim=2, name=info.field_name)


class WeightedCsiRsPrecoder(BaseModel):
    """Uplink precoder obtained from a weighted CSI-RS."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weight: np.ndarray = Field(description="n_Tx x layers downlink weight W_DL")
    received: np.ndarray = Field(description="n_Rx x layers received y = H W_DL")
    precoder: np.ndarray = Field(description="Per-layer normalized uplink precoder")
    gain: float = Field(ge=0, description="||H W_DL||_F^2")

    @field_validator("weight", "received", "precoder", mode="before")
    @classmethod
    def _as_matrix(cls, value, info):
        return frozen_array(value, ndim=2, name=info.field_name)


class UeResult(BaseModel):
    """Outcome of one UE in a drop."""

    model_config = ConfigDict(frozen=True)

    ue: int = Field(ge=0)
    mode: TransmissionMode
    feedback: Feedback
    serving_trp: int = Field(ge=0)
    coordination_set: Tuple[int, ...]
    region: int = Field(ge=1, le=4)
    sinr: float = Field(ge=0, description="Linear SINR averaged over frequency units")
    sinr_db: float
    se: float = Field(ge=0, description="Spectral efficiency in b/s/Hz")
    upt_bps: float = Field(ge=0)


class DropResult(BaseModel):
    """All UEs of one drop for one (mode, feedback) combination."""

    model_config = ConfigDict(frozen=True)

    mode: TransmissionMode
    feedback: Feedback
    ues: List[UeResult]
