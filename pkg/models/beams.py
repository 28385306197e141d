"""
Beam-indication Pydantic models.

UE trajectories, per-TRP beam grids, beam-indication signaling models, the
radio scenario they run in, and the per-sample results.
"""

import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import frozen_array


Mechanism = Literal["DCI", "MAC_CE"]


class Trajectory(BaseModel):
    """Polyline route sampled every sample_spacing_m."""

    model_config = ConfigDict(frozen=True)

    waypoints: List[Tuple[float, float]] = Field(min_length=2)
    speed_mps: float = Field(default=33.3, gt=0)
    sample_spacing_m: float = Field(default=1.0, gt=0)
    sample_count: int = Field(default=100, ge=1)

    @property
    def sample_interval_s(self) -> float:
        """Time between reported samples."""
        return self.sample_spacing_m / self.speed_mps

    @property
    def duration_s(self) -> float:
        return (self.sample_count - 1) * self.sample_interval_s


class BeamGrid(BaseModel):
    """Fixed grid of beams at one TRP."""

    model_config = ConfigDict(frozen=True)

    trp_position: Tuple[float, float]
    beam_count: int = Field(ge=1)
    beam_centers: Tuple[float, ...] = Field(description="Beam pointing angles in radians")
    beamwidth: float = Field(gt=0, description="Half-power beamwidth in radians")
    peak_gain_db: float = Field(default=24.0)
    sidelobe_floor_db: float = Field(default=-20.0, lt=0)

    @model_validator(mode="after")
    def _centers(self) -> "BeamGrid":
        if len(self.beam_centers) != self.beam_count:
            raise ValueError(f"{len(self.beam_centers)} beam centers for beam_count={self.beam_count}")
        return self

    @classmethod
    def uniform(
        cls,
        trp_position: Tuple[float, float],
        beam_count: int,
        sector_center: float,
        sector_width: float,
        peak_gain_db: float = 24.0,
        beamwidth: Optional[float] = None,
    ) -> "BeamGrid":
        """Beams evenly covering [center - width/2, center + width/2]."""
        step = sector_width / beam_count
        centers = tuple(
            sector_center - sector_width / 2 + step * (k + 0.5) for k in range(beam_count)
        )
        return cls(
            trp_position=trp_position,
            beam_count=beam_count,
            beam_centers=centers,
            beamwidth=beamwidth if beamwidth is not None else step,
            peak_gain_db=peak_gain_db,
        )


class IndicationModel(BaseModel):
    """Latency and reliability of a beam-indication signaling path."""

    model_config = ConfigDict(frozen=True)

    mechanism: Mechanism
    latency_s: float = Field(ge=0, description="Signaling latency; inf never delivers")
    bler: float = Field(default=0.0, ge=0, lt=1)
    application_delay_s: float = Field(default=0.0, ge=0)

    @classmethod
    def dci(cls, application_delay_s: float = 0.0) -> "IndicationModel":
        """DCI-based indication: 0.5 ms, 1% BLER."""
        return cls(mechanism="DCI", latency_s=0.5e-3, bler=0.01, application_delay_s=application_delay_s)

    @classmethod
    def mac_ce(cls, application_delay_s: float = 0.0) -> "IndicationModel":
        """MAC-CE-based indication: 3 ms, 10% BLER."""
        return cls(mechanism="MAC_CE", latency_s=3e-3, bler=0.10, application_delay_s=application_delay_s)


class BeamScenario(BaseModel):
    """Trajectory, grids and link budget for one beam-tracking study."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(default="custom")
    trajectory: Trajectory
    grids: List[BeamGrid] = Field(min_length=1)
    tx_power_dbm: float = Field(default=33.0)
    noise_power_dbm: float = Field(default=-84.0, description="Noise over the carrier bandwidth")
    pathloss_exponent: float = Field(default=2.0, gt=0)
    pathloss_ref_db: float = Field(default=61.4, description="Pathloss at 1 m (28 GHz free space)")
    penetration_loss_db: float = Field(default=0.0, ge=0, description="Vehicle or carriage loss")
    interference: bool = Field(default=False, description="Other TRPs transmit on random beams")
    substep_s: float = Field(default=0.5e-3, gt=0, description="Event-loop resolution")
    se_cap: float = Field(default=7.4, gt=0)


class BeamSample(BaseModel):
    """Result at one reported sample point."""

    model_config = ConfigDict(frozen=True)

    sample_index: int = Field(ge=0)
    position_m: float = Field(ge=0, description="Distance travelled along the trajectory")
    serving_beam: int = Field(ge=0)
    ideal_beam: int = Field(ge=0)
    sinr_db: float
    se: float = Field(ge=0)
    indication_sinr_db: float = Field(description="SINR of the beam carrying pending indications")


class EmpiricalCdf(BaseModel):
    """Sorted samples with their cumulative probabilities."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    probabilities: np.ndarray

    @field_validator("values", "probabilities", mode="before")
    @classmethod
    def _as_vector(cls, value, info):
        return frozen_array(value, dtype=np.float64, ndim=1, name=info.field_name)

    @model_validator(mode="after")
    def _monotone(self) -> "EmpiricalCdf":
        if self.values.shape != self.probabilities.shape or self.values.size == 0:
            raise ValueError("values and probabilities must be non-empty and aligned")
        if np.any(np.diff(self.values) < 0) or np.any(np.diff(self.probabilities) < 0):
            raise ValueError("CDF must be non-decreasing")
        return self

    def quantile(self, q: float) -> float:
        """Quantile with linear interpolation between order statistics."""
        if not 0.0 <= q <= 1.0:
            raise ValueError(f"quantile {q} outside [0, 1]")
        return float(np.quantile(self.values, q, method="linear"))

    @property
    def median(self) -> float:
        return self.quantile(0.5)

    @property
    def edge(self) -> float:
        """5th percentile (cell-edge metric)."""
        return self.quantile(0.05)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    def probability_at(self, x: float) -> float:
        """P(X <= x)."""
        count = np.searchsorted(self.values, x, side="right")
        return 0.0 if count == 0 else float(self.probabilities[count - 1])
