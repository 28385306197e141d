"""
Experiment configuration and result Pydantic models.

One parameter block per CLI experiment. Blocks forbid unknown keys so a typo
in a config file is reported instead of silently ignored.
"""

from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .beams import Mechanism
from .evaluation import DropParams, Feedback, FeedbackSettings, TransmissionMode


ExperimentName = Literal["power-ratio", "srs-mse", "cjt-sinr", "predict", "beam-sim", "upt", "occ"]

SCHEMAS: Dict[str, Tuple[str, ...]] = {
    "power-ratio": ("drop", "basis", "k", "power_ratio"),
    "srs-mse": ("drop", "hopping", "inr_db", "mse", "tap_err_count"),
    "cjt-sinr": ("drop", "ue", "mode", "feedback", "sinr_db", "se"),
    "predict": ("drop", "slot", "nmse_predicted", "nmse_stale"),
    "beam-sim": ("drop", "sample_index", "position_m", "mechanism", "sinr_db", "se"),
    "upt": ("bursts", "total_bits", "total_duration_s", "upt_bps"),
    "occ": ("drop", "occ_length", "ports", "delay_spread_ns", "mean_leakage", "max_leakage", "nmse"),
}


class _Block(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class PowerRatioParams(_Block):
    """Angle-delay sparsity of DFT vs eigen bases on a correlated ensemble."""

    ports_vertical: int = Field(default=2, ge=1)
    ports_horizontal: int = Field(default=8, ge=1)
    polarizations: Literal[1, 2] = Field(default=2)
    units: int = Field(default=13, ge=1)
    k_values: List[int] = Field(default=[10, 20, 30, 40, 50, 75, 100, 150, 200], min_length=1)
    covariance_snapshots: int = Field(default=20, ge=1, description="Snapshots per eigen basis")
    max_doppler_hz: float = Field(default=100.0, ge=0)
    path_min: int = Field(default=2, ge=1)
    path_max: int = Field(default=8, ge=1)
    bases: List[Literal["dft", "eigen"]] = Field(default=["dft", "eigen"], min_length=1)

    @model_validator(mode="after")
    def _k_range(self) -> "PowerRatioParams":
        total = self.ports_vertical * self.ports_horizontal * self.polarizations * self.units
        if any(k < 1 or k > total for k in self.k_values):
            raise ValueError(f"k_values must lie in [1, {total}]")
        if self.path_min > self.path_max:
            raise ValueError("path_min exceeds path_max")
        return self


class SrsMseParams(_Block):
    """Cyclic-shift hopping against a fixed shift under one interfering UE."""

    length_M: int = Field(default=139, ge=3)
    transmissions_N: int = Field(default=64, ge=1)
    target_root: int = Field(default=1, ge=1)
    interferer_root: int = Field(default=2, ge=1)
    target_taps: int = Field(default=3, ge=1)
    interferer_taps: int = Field(default=3, ge=1)
    max_tap: int = Field(default=12, ge=1, description="Taps are drawn from [0, max_tap)")
    noise_power: float = Field(default=0.1, gt=0, description="Per-subcarrier noise, unit-power target")
    inr_db: List[float] = Field(default=[10.0], min_length=1)
    threshold_factor: float = Field(default=3.0, gt=0)
    cs_grid: Literal["continuous", "discrete12"] = Field(default="continuous")
    doppler_hz: float = Field(default=0.0, ge=0, description="0 keeps the channel block-static")
    transmission_gap_s: float = Field(default=5e-3, gt=0)

    @model_validator(mode="after")
    def _taps(self) -> "SrsMseParams":
        if max(self.target_taps, self.interferer_taps) > self.max_tap or self.max_tap > self.length_M:
            raise ValueError("tap counts must fit in max_tap <= length_M")
        return self


class CjtSinrParams(_Block):
    """Single-TRP vs CJT SINR over random drops."""

    drop: DropParams = Field(default_factory=DropParams)
    modes: List[TransmissionMode] = Field(default=["single_trp", "cjt"], min_length=1)
    feedbacks: List[Feedback] = Field(default=["ideal", "etype2", "cjt_codebook"], min_length=1)
    settings: FeedbackSettings = Field(default_factory=FeedbackSettings)
    threshold_db: float = Field(default=10.0, ge=0)


class PredictParams(_Block):
    """Doppler prediction against stale CSI."""

    ports_vertical: int = Field(default=1, ge=1)
    ports_horizontal: int = Field(default=8, ge=1)
    polarizations: Literal[1, 2] = Field(default=2)
    units: int = Field(default=13, ge=1)
    snapshots_N: int = Field(default=16, ge=2)
    future_M: int = Field(default=4, ge=1)
    slot_gap_dt: float = Field(default=1e-3, gt=0)
    pairs_K: int = Field(default=64, ge=1)
    doppler_oversampling: int = Field(default=8, ge=1)
    normalized_doppler: float = Field(default=0.2, ge=0, description="fD * M * dt")
    path_min: int = Field(default=2, ge=1)
    path_max: int = Field(default=8, ge=1)


class BeamSimParams(_Block):
    """DCI vs MAC-CE beam indication on a preset or the default drive-by."""

    preset: Literal["duh", "hst"] = Field(default="duh")
    mechanisms: List[Mechanism] = Field(default=["DCI", "MAC_CE"], min_length=1)
    sample_count: int = Field(default=100, ge=1)
    application_delay_s: float = Field(default=0.0, ge=0)
    dci_latency_s: float = Field(default=0.5e-3, ge=0)
    dci_bler: float = Field(default=0.01, ge=0, lt=1)
    mac_ce_latency_s: float = Field(default=3e-3, ge=0)
    mac_ce_bler: float = Field(default=0.10, ge=0, lt=1)
    interference: Optional[bool] = Field(default=None, description="Override the preset")


class UptParams(_Block):
    """User perceived throughput from a burst log."""

    bursts_path: Optional[str] = Field(default=None, description="CSV with size_bits, duration_s")


class OccParams(_Block):
    """DMRS OCC-2 vs OCC-4 leakage over a delay-spread sweep."""

    occ_lengths: List[Literal[2, 4]] = Field(default=[2, 4], min_length=1)
    subcarriers: int = Field(default=48, ge=12)
    delay_spreads_ns: List[float] = Field(default=[50.0, 100.0, 200.0, 400.0, 800.0], min_length=1)
    subcarrier_spacing_hz: float = Field(default=30e3, gt=0)
    taps: int = Field(default=12, ge=1)

    @model_validator(mode="after")
    def _grid(self) -> "OccParams":
        if self.subcarriers % 12 != 0:
            raise ValueError("subcarriers must be a multiple of 12")
        return self


class ExperimentConfig(BaseModel):
    """Validated experiment configuration."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    experiment: ExperimentName
    seed: int = Field(default=0, ge=0, lt=2**63)
    drops: int = Field(default=1, ge=0)
    workers: int = Field(default=1, ge=1)

    power_ratio: PowerRatioParams = Field(default_factory=PowerRatioParams)
    srs_mse: SrsMseParams = Field(default_factory=SrsMseParams)
    cjt_sinr: CjtSinrParams = Field(default_factory=CjtSinrParams)
    predict: PredictParams = Field(default_factory=PredictParams)
    beam_sim: BeamSimParams = Field(default_factory=BeamSimParams)
    upt: UptParams = Field(default_factory=UptParams)
    occ: OccParams = Field(default_factory=OccParams)


class ResultTable(BaseModel):
    """Rows of one experiment run plus provenance metadata."""

    model_config = ConfigDict(frozen=True)

    experiment: ExperimentName
    header: Tuple[str, ...]
    rows: List[Tuple] = Field(default_factory=list)
    metadata: Dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _schema(self) -> "ResultTable":
        if self.header != SCHEMAS[self.experiment]:
            raise ValueError(f"header {self.header} does not match the {self.experiment} schema")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise ValueError(f"row {i} has {len(row)} fields, expected {len(self.header)}")
        return self
