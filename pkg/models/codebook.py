"""
Codebook Pydantic models.

Configuration for Type-I, enhanced Type-II, multi-TRP CJT and Doppler-domain
codebooks, and the PrecoderReport they all produce.
"""

import math
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .arrays import frozen_array


Quantizer = Literal["none", "amp8-psk16"]

MAX_LAYERS = 8


class Type1Config(BaseModel):
    """Type-I single-panel codebook (dual-polarized N1 x N2 ports)."""

    model_config = ConfigDict(frozen=True)

    ports: int = Field(ge=2, description="Total CSI-RS ports P = 2 * N1 * N2")
    n_vertical: int = Field(default=1, ge=1, description="N2, ports per column")
    beams_in_group: Literal[1, 4] = Field(default=1, description="Beams per W_1 group")
    oversampling: int = Field(default=4, ge=1, description="DFT oversampling per dimension")
    cophase_levels: Literal[2, 4] = Field(default=4, description="Co-phase alphabet size")
    rank: Literal[1, 2] = Field(default=1, description="Number of layers")

    @model_validator(mode="after")
    def _layout(self) -> "Type1Config":
        if self.ports % (2 * self.n_vertical) != 0:
            raise ValueError(
                f"ports={self.ports} is not 2 x n_vertical({self.n_vertical}) x N1"
            )
        return self

    @property
    def n_horizontal(self) -> int:
        """N1, ports per row in one polarization."""
        return self.ports // (2 * self.n_vertical)

    @property
    def oversampling_vertical(self) -> int:
        return self.oversampling if self.n_vertical > 1 else 1


class EType2Config(BaseModel):
    """Release-16 enhanced Type-II codebook with frequency compression."""

    model_config = ConfigDict(frozen=True)

    ports: int = Field(ge=2, description="Total ports P (dual polarization)")
    n_vertical: int = Field(default=1, ge=1, description="N2, ports per column")
    beams_L: int = Field(ge=1, description="Spatial beams per polarization")
    freq_units_F: int = Field(ge=1, description="Frequency units F")
    delay_dim_Z: Optional[int] = Field(default=None, ge=1, description="Frequency basis size Z")
    fraction_p: Optional[float] = Field(default=None, gt=0, le=1, description="p in Z = ceil(p F / phi)")
    units_per_subframe: int = Field(default=1, ge=1, description="phi")
    top_K: int = Field(ge=1, description="Non-zero coefficients kept per layer")
    layers: int = Field(default=1, ge=1, le=MAX_LAYERS, description="Transmission layers")
    quantizer: Quantizer = Field(default="none")

    @property
    def delay_dim(self) -> int:
        """Z, explicit or derived from p."""
        if self.delay_dim_Z is not None:
            return self.delay_dim_Z
        if self.fraction_p is not None:
            return math.ceil(self.fraction_p * self.freq_units_F / self.units_per_subframe)
        return self.freq_units_F

    @model_validator(mode="after")
    def _dimensions(self) -> "EType2Config":
        if self.ports % (2 * self.n_vertical) != 0:
            raise ValueError(f"ports={self.ports} is not 2 x n_vertical x N1")
        if self.beams_L > self.ports // 2:
            raise ValueError(f"beams_L={self.beams_L} exceeds ports per polarization")
        z = self.delay_dim
        if z > self.freq_units_F:
            raise ValueError(f"Z={z} exceeds freq_units_F={self.freq_units_F}")
        if self.top_K > 2 * self.beams_L * z:
            raise ValueError(f"top_K={self.top_K} exceeds 2*L*Z={2 * self.beams_L * z}")
        return self


class CjtConfig(BaseModel):
    """Multi-TRP coherent joint transmission codebook."""

    model_config = ConfigDict(frozen=True)

    trp_count: int = Field(ge=1, description="N cooperating TRPs")
    ports_per_trp: int = Field(ge=2, description="P ports per TRP")
    n_vertical: int = Field(default=1, ge=1)
    per_trp_beams: List[int] = Field(description="L_n per TRP")
    per_trp_freq: List[int] = Field(description="M_n per TRP")
    per_trp_topK: List[int] = Field(description="K_n per TRP")
    joint_frequency_basis: bool = Field(default=False, description="Common W_f across TRPs")
    quantizer: Quantizer = Field(default="none")

    @model_validator(mode="after")
    def _lists(self) -> "CjtConfig":
        n = self.trp_count
        for name in ("per_trp_beams", "per_trp_freq", "per_trp_topK"):
            values = getattr(self, name)
            if len(values) != n:
                raise ValueError(f"{name} has {len(values)} entries, expected trp_count={n}")
            if any(v < 1 for v in values):
                raise ValueError(f"{name} entries must be >= 1")
        for idx, (l, m, k) in enumerate(zip(self.per_trp_beams, self.per_trp_freq, self.per_trp_topK)):
            if k > 2 * l * m:
                raise ValueError(f"per_trp_topK[{idx}]={k} exceeds 2*L*M={2 * l * m}")
            if l > self.ports_per_trp // 2:
                raise ValueError(f"per_trp_beams[{idx}]={l} exceeds ports per polarization")
        if self.joint_frequency_basis and len(set(self.per_trp_freq)) > 1:
            raise ValueError("joint_frequency_basis requires equal per_trp_freq entries")
        return self


class DopplerConfig(BaseModel):
    """Doppler-domain codebook: eType-II plus a time DFT basis over N_slot slots."""

    model_config = ConfigDict(frozen=True)

    slots_N_slot: int = Field(ge=1, description="Predicted slots compressed together")
    time_basis_T: int = Field(default=1, ge=1, description="Time-domain basis vectors T")
    etype2: EType2Config
    top_K: Optional[int] = Field(default=None, ge=1, description="K over 2L x M x T (default etype2.top_K)")

    @property
    def coefficients_K(self) -> int:
        return self.top_K if self.top_K is not None else self.etype2.top_K

    @model_validator(mode="after")
    def _time(self) -> "DopplerConfig":
        if self.time_basis_T > self.slots_N_slot:
            raise ValueError(f"time_basis_T={self.time_basis_T} exceeds slots_N_slot={self.slots_N_slot}")
        available = 2 * self.etype2.beams_L * self.etype2.delay_dim * self.time_basis_T
        if self.coefficients_K > available:
            raise ValueError(f"top_K={self.coefficients_K} exceeds 2*L*M*T={available}")
        return self


class Coefficient(BaseModel):
    """One reported combining coefficient (row = spatial, col = frequency[-time])."""

    model_config = ConfigDict(frozen=True)

    row: int = Field(ge=0)
    col: int = Field(ge=0)
    value: complex

    @field_validator("value", mode="before")
    @classmethod
    def _coerce(cls, value):
        return complex(value)


class ReportBlock(BaseModel):
    """Selections and coefficients for one (TRP, layer)."""

    model_config = ConfigDict(frozen=True)

    trp: int = Field(default=0, ge=0)
    layer: int = Field(default=0, ge=0)
    spatial_indices: Tuple[int, ...] = Field(description="Selected spatial basis columns")
    frequency_indices: Tuple[int, ...] = Field(description="Selected frequency basis columns")
    time_indices: Tuple[int, ...] = Field(default=(0,), description="Selected time basis columns")
    scale: complex = Field(default=0j, description="Strongest coefficient before normalization")
    coefficients: Tuple[Coefficient, ...] = Field(default=())

    @field_validator("scale", mode="before")
    @classmethod
    def _coerce(cls, value):
        return complex(value)

    @model_validator(mode="after")
    def _indices(self) -> "ReportBlock":
        cols = len(self.frequency_indices) * len(self.time_indices)
        for c in self.coefficients:
            if c.row >= len(self.spatial_indices) or c.col >= cols:
                raise ValueError(f"coefficient ({c.row}, {c.col}) outside the selected bases")
        if self.coefficients and self.scale != 0:
            strongest = max(abs(c.value) for c in self.coefficients)
            if abs(strongest - 1.0) > 1e-9:
                raise ValueError("strongest coefficient must have unit normalized amplitude")
        return self


class PrecoderReport(BaseModel):
    """Quantized CSI feedback: basis selections plus sparse coefficients."""

    model_config = ConfigDict(frozen=True)

    kind: Literal["type1", "etype2", "cjt", "doppler"]
    quantizer_id: Quantizer = Field(default="none")
    basis_kind: Literal["dft", "eigen"] = Field(default="dft")
    ports: int = Field(ge=1, description="Ports per TRP")
    spatial_dimension: Optional[int] = Field(
        default=None, ge=1, description="Spatial basis columns (defaults to ports)"
    )
    n_vertical: int = Field(default=1, ge=1)
    freq_units: int = Field(ge=1)
    slots: int = Field(default=1, ge=1)
    trp_count: int = Field(default=1, ge=1)
    layers: int = Field(default=1, ge=1, le=MAX_LAYERS)
    blocks: Tuple[ReportBlock, ...] = Field(default=())

    @model_validator(mode="after")
    def _ranges(self) -> "PrecoderReport":
        for b in self.blocks:
            if b.trp >= self.trp_count or b.layer >= self.layers:
                raise ValueError(f"block (trp={b.trp}, layer={b.layer}) outside report dimensions")
            if any(i >= self.spatial_columns for i in b.spatial_indices):
                raise ValueError("spatial index outside basis dimension")
            if any(i >= self.freq_units for i in b.frequency_indices):
                raise ValueError("frequency index outside basis dimension")
            if any(i >= self.slots for i in b.time_indices):
                raise ValueError("time index outside basis dimension")
        return self

    @property
    def spatial_columns(self) -> int:
        return self.spatial_dimension if self.spatial_dimension is not None else self.ports

    def block(self, trp: int = 0, layer: int = 0) -> ReportBlock:
        """Block for (trp, layer); raises KeyError when absent."""
        for b in self.blocks:
            if b.trp == trp and b.layer == layer:
                return b
        raise KeyError((trp, layer))

    @property
    def spatial_indices(self) -> List[Tuple[int, ...]]:
        """Selected spatial columns per TRP (layer 0)."""
        return [self.block(n, 0).spatial_indices for n in range(self.trp_count)]

    @property
    def frequency_indices(self) -> List[Tuple[int, ...]]:
        """Selected frequency columns per TRP (layer 0)."""
        return [self.block(n, 0).frequency_indices for n in range(self.trp_count)]

    @property
    def coefficients(self) -> List[Tuple[int, int, int, complex]]:
        """Flat (trp, row, col, value) list across all blocks."""
        return [(b.trp, c.row, c.col, c.value) for b in self.blocks for c in b.coefficients]

    def coefficient_count(self, trp: int) -> int:
        return sum(len(b.coefficients) for b in self.blocks if b.trp == trp)


class Type1Result(BaseModel):
    """Type-I selection with its reconstructed beamformer."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    report: PrecoderReport
    beamformer: np.ndarray = Field(description="P x rank codeword")
    beam: Tuple[int, int] = Field(description="(l, m) oversampled beam indices")
    group: Tuple[int, int] = Field(description="(i11, i12) beam-group indices")
    cophase_index: int = Field(ge=0)
    gain: float = Field(ge=0, description="||H^H W||_F^2 of the selected codeword")

    @field_validator("beamformer", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        return frozen_array(value, ndim=2, name="beamformer")
