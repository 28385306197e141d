"""
Channel-core Pydantic models.

Array geometry, multipath clusters, frequency grid, channel snapshots and
the spatial/frequency basis pairs every other module projects onto.
"""

import math
from typing import List, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import frozen_array, unitary_error


UNITARY_TOLERANCE = 1e-9


class ArrayConfig(BaseModel):
    """Uniform planar array, optionally dual-polarized."""

    model_config = ConfigDict(frozen=True)

    ports_vertical: int = Field(default=1, ge=1, description="Rows of the array (N2)")
    ports_horizontal: int = Field(default=1, ge=1, description="Columns of the array (N1)")
    polarizations: Literal[1, 2] = Field(default=1, description="1 or 2 polarization blocks")
    spacing_v: float = Field(default=0.8, gt=0, description="Vertical spacing in wavelengths")
    spacing_h: float = Field(default=0.5, gt=0, description="Horizontal spacing in wavelengths")

    @property
    def block_ports(self) -> int:
        """Ports per polarization block."""
        return self.ports_vertical * self.ports_horizontal

    @property
    def total_ports(self) -> int:
        """P = ports_vertical x ports_horizontal x polarizations."""
        return self.block_ports * self.polarizations


class PathCluster(BaseModel):
    """One propagation path: gain, Doppler, direction and delay."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    gain: complex = Field(description="Complex path gain")
    doppler_hz: float = Field(default=0.0, description="Doppler shift in Hz")
    azimuth: float = Field(default=0.0, description="Azimuth of departure in radians")
    zenith: float = Field(default=math.pi / 2, description="Zenith of departure in radians")
    delay_s: float = Field(default=0.0, ge=0.0, description="Path delay in seconds")
    polarization_phase: float = Field(
        default=0.0, description="Co-phase of the second polarization block in radians"
    )

    @field_validator("gain", mode="before")
    @classmethod
    def _coerce_gain(cls, value):
        gain = complex(value)
        if not (math.isfinite(gain.real) and math.isfinite(gain.imag)):
            raise ValueError("gain must be finite")
        return gain

    @field_validator("doppler_hz", "azimuth", "zenith", "polarization_phase")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value


class FrequencyGrid(BaseModel):
    """Frequency-domain units (subbands) the channel is sampled on."""

    model_config = ConfigDict(frozen=True)

    units: int = Field(default=13, ge=1, description="Number of frequency units N_f")
    unit_spacing_hz: float = Field(default=1.44e6, gt=0, description="Spacing between units")
    subcarriers_per_unit: int = Field(default=48, ge=1, description="Subcarriers per unit")

    @property
    def tau_max(self) -> float:
        """Largest delay representable without wrap-around."""
        return 1.0 / self.unit_spacing_hz


class ChannelSnapshot(BaseModel):
    """Space-frequency channel matrix (P x N_f) at one slot."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray = Field(description="Complex P x N_f channel matrix")
    timestamp: int = Field(default=0, description="Slot index")
    time_s: float = Field(default=0.0, description="Slot time in seconds")

    @field_validator("matrix", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return frozen_array(value, ndim=2, name="matrix")

    @property
    def ports(self) -> int:
        return self.matrix.shape[0]

    @property
    def units(self) -> int:
        return self.matrix.shape[1]


class BasisPair(BaseModel):
    """Spatial (P x P) and frequency (N_f x N_f) unitary bases."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    spatial: np.ndarray = Field(description="Unitary P x P spatial basis W_1")
    frequency: np.ndarray = Field(description="Unitary N_f x N_f frequency basis W_f")
    kind: Literal["dft", "eigen"] = Field(description="How the basis was built")

    @field_validator("spatial", "frequency", mode="before")
    @classmethod
    def _as_square(cls, value, info):
        arr = frozen_array(value, ndim=2, name=info.field_name)
        if arr.shape[0] != arr.shape[1]:
            raise ValueError(f"{info.field_name} basis must be square, got {arr.shape}")
        return arr

    @model_validator(mode="after")
    def _unitary(self) -> "BasisPair":
        for name in ("spatial", "frequency"):
            err = unitary_error(getattr(self, name))
            if err >= UNITARY_TOLERANCE:
                raise ValueError(f"{name} basis is not unitary (max deviation {err:.3e})")
        return self


class ChannelProcess(BaseModel):
    """Time-indexed channel built from a fixed list of paths."""

    model_config = ConfigDict(frozen=True)

    paths: List[PathCluster] = Field(default_factory=list)
    array: ArrayConfig
    grid: FrequencyGrid
    slot_duration_s: float = Field(default=0.5e-3, gt=0, description="Slot duration")
