"""
SRS sounding Pydantic models.

Root sequences, cyclic-shift schedules, received observations, delay-domain
power profiles and the antenna-switching / hopping resource map.
"""

import math
from typing import Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import frozen_array


TWO_PI = 2.0 * math.pi


class SrsSequence(BaseModel):
    """Unit-modulus sounding sequence, possibly cyclically shifted."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    root: int = Field(ge=1, description="Root index q")
    length: int = Field(ge=1, description="Allocated subcarriers M")
    values: np.ndarray = Field(description="Complex length-M sequence")
    prime_length: int = Field(ge=1, description="Length of the underlying root sequence")
    cyclic_shift: float = Field(default=0.0, ge=0.0, lt=TWO_PI, description="Applied CS alpha")

    @field_validator("values", mode="before")
    @classmethod
    def _as_vector(cls, value):
        return frozen_array(value, ndim=1, name="values")

    @model_validator(mode="after")
    def _unit_modulus(self) -> "SrsSequence":
        if self.values.shape[0] != self.length:
            raise ValueError(f"values has {self.values.shape[0]} entries, length is {self.length}")
        if np.max(np.abs(np.abs(self.values) - 1.0)) > 1e-12:
            raise ValueError("sequence must be unit modulus")
        return self


class CsSchedule(BaseModel):
    """Per-transmission cyclic shifts."""

    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...] = Field(description="alpha_n in [0, 2*pi) per transmission")
    mode: Literal["fixed", "hopping"] = Field(default="fixed")
    grid: Literal["continuous", "discrete12"] = Field(default="continuous")

    @field_validator("values")
    @classmethod
    def _range(cls, values):
        for v in values:
            if not (0.0 <= v < TWO_PI):
                raise ValueError(f"cyclic shift {v} outside [0, 2*pi)")
        return values


class SrsObservation(BaseModel):
    """Received sequence y_n for one transmission."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    y: np.ndarray = Field(description="Complex length-M received sequence")
    transmission_index: int = Field(default=0, ge=0)

    @field_validator("y", mode="before")
    @classmethod
    def _as_vector(cls, value):
        return frozen_array(value, ndim=1, name="y")


class DelayProfile(BaseModel):
    """Time-averaged power-delay profile."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pdp: np.ndarray = Field(description="Non-negative length-M power per tap")
    transmissions_accumulated: int = Field(ge=1)
    noise_floor_estimate: float = Field(ge=0.0)

    @field_validator("pdp", mode="before")
    @classmethod
    def _nonnegative(cls, value):
        arr = frozen_array(value, dtype=np.float64, ndim=1, name="pdp")
        if np.any(arr < 0):
            raise ValueError("pdp must be non-negative")
        return arr


class SrsResourceMap(BaseModel):
    """Antenna switching, frequency hopping and partial-SRS layout."""

    model_config = ConfigDict(frozen=True)

    ports: int = Field(default=4, ge=1, description="UE antenna ports to sound")
    tx_chains: int = Field(default=2, ge=1, description="Ports sounded per symbol")
    symbols: int = Field(default=2, ge=1, description="SRS symbols per hop")
    hop_count: int = Field(default=1, ge=1, description="Subbands visited")
    partial_factor: int = Field(default=1, ge=1, description="UEs sharing each hop bandwidth")
    band_subcarriers: int = Field(default=96, ge=1, description="Sounded bandwidth")

    @model_validator(mode="after")
    def _feasible(self) -> "SrsResourceMap":
        if self.tx_chains * self.symbols < self.ports:
            raise ValueError(
                f"infeasible antenna switching: {self.tx_chains} ports/symbol x "
                f"{self.symbols} symbols < {self.ports} ports"
            )
        if self.band_subcarriers % (self.hop_count * self.partial_factor) != 0:
            raise ValueError("band_subcarriers must divide evenly into hops and partial parts")
        return self


class SrsAssignment(BaseModel):
    """Ports and subcarriers sounded in one SRS symbol."""

    model_config = ConfigDict(frozen=True)

    ue: int = Field(ge=0)
    round: int = Field(ge=0, description="Partial-SRS rotation round")
    hop: int = Field(ge=0)
    symbol: int = Field(ge=0)
    ports: Tuple[int, ...]
    start: int = Field(ge=0, description="First subcarrier (inclusive)")
    stop: int = Field(ge=1, description="Last subcarrier (exclusive)")


class ChannelEstimate(BaseModel):
    """Per-transmission channel estimates and their normalized error."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    estimates: np.ndarray = Field(description="N x M estimated channels")
    per_transmission_mse: Tuple[float, ...]
    mse: float = Field(ge=0.0, description="Mean normalized squared error")

    @field_validator("estimates", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return frozen_array(value, ndim=2, name="estimates")

    @property
    def latest(self) -> np.ndarray:
        """Estimate from the most recent transmission."""
        return self.estimates[-1]
