"""
CSI prediction Pydantic models.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class PredictionConfig(BaseModel):
    """Snapshot window, prediction horizon and Doppler estimator settings."""

    model_config = ConfigDict(frozen=True)

    snapshots_N: int = Field(default=8, ge=2, description="Observed CSI-RS snapshots N")
    slot_gap_dt: float = Field(default=1e-3, gt=0, description="Spacing between snapshots (s)")
    future_M: int = Field(default=4, ge=1, description="Predicted future slots M")
    pairs_K: int = Field(default=16, ge=1, description="Angle-delay pairs tracked")
    doppler_oversampling: int = Field(default=8, ge=1, description="Time DFT oversampling")
    max_doppler_hz: Optional[float] = Field(
        default=None, ge=0, description="Largest Doppler the scenario may produce"
    )

    @property
    def nyquist_hz(self) -> float:
        """1 / (2 dt), the largest unambiguous Doppler."""
        return 1.0 / (2.0 * self.slot_gap_dt)

    @model_validator(mode="after")
    def _aliasing(self) -> "PredictionConfig":
        if self.max_doppler_hz is not None and self.max_doppler_hz >= self.nyquist_hz:
            raise ValueError(
                f"max_doppler_hz={self.max_doppler_hz} aliases at slot_gap_dt={self.slot_gap_dt} "
                f"(limit {self.nyquist_hz})"
            )
        return self


class DopplerTrack(BaseModel):
    """One angle-delay pair modelled as a single complex exponential."""

    model_config = ConfigDict(frozen=True)

    pair_index: Tuple[int, int] = Field(description="(angle index, delay index)")
    amplitude: complex = Field(description="Coefficient at the last observed snapshot")
    doppler_hz: float

    @field_validator("amplitude", mode="before")
    @classmethod
    def _coerce(cls, value):
        return complex(value)
