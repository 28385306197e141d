"""
Shared fixtures for mimolab tests.

This module provides:
- Seeded random generators
- Small array / grid geometries and channels
- Codebook configurations
- Small experiment configs that run in well under a second
"""

import math

import numpy as np
import pytest

from models.channel import ArrayConfig, FrequencyGrid, PathCluster
from models.codebook import EType2Config
from models.experiment import ExperimentConfig
from phy.channel import synthesize_channel


# =============================================================================
# Random Generators
# =============================================================================

@pytest.fixture
def rng() -> np.random.Generator:
    """Deterministic generator for tests that draw random inputs."""
    return np.random.default_rng(20240607)


def complex_normal(rng: np.random.Generator, *shape) -> np.ndarray:
    """Circularly-symmetric unit-variance complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


# =============================================================================
# Geometry Fixtures
# =============================================================================

@pytest.fixture
def dual_pol_array() -> ArrayConfig:
    """1 x 4 dual-polarized array (P = 8)."""
    return ArrayConfig(ports_horizontal=4, polarizations=2)


@pytest.fixture
def planar_array() -> ArrayConfig:
    """2 x 4 dual-polarized array (P = 16)."""
    return ArrayConfig(ports_vertical=2, ports_horizontal=4, polarizations=2)


@pytest.fixture
def small_grid() -> FrequencyGrid:
    """Six frequency units."""
    return FrequencyGrid(units=6)


@pytest.fixture
def two_paths() -> list:
    """Two static paths with distinct angles and delays."""
    return [
        PathCluster(gain=1.0 + 0.5j, azimuth=0.3, delay_s=50e-9),
        PathCluster(gain=-0.4 + 0.2j, azimuth=-0.7, delay_s=200e-9, polarization_phase=1.1),
    ]


@pytest.fixture
def random_channel(rng, dual_pol_array, small_grid) -> np.ndarray:
    """Dense i.i.d. 8 x 6 channel."""
    return complex_normal(rng, dual_pol_array.total_ports, small_grid.units)


@pytest.fixture
def path_channel(two_paths, dual_pol_array, small_grid) -> np.ndarray:
    """Two-path 8 x 6 channel matrix."""
    return synthesize_channel(two_paths, 0.0, dual_pol_array, small_grid).matrix


# =============================================================================
# Codebook Fixtures
# =============================================================================

@pytest.fixture
def full_etype2() -> EType2Config:
    """eType-II with every beam, delay and coefficient kept (P = 8, F = 6)."""
    return EType2Config(ports=8, beams_L=4, freq_units_F=6, delay_dim_Z=6, top_K=48)


@pytest.fixture
def compact_etype2() -> EType2Config:
    """eType-II with L = 2, Z = 3, K = 8 (P = 8, F = 6)."""
    return EType2Config(ports=8, beams_L=2, freq_units_F=6, delay_dim_Z=3, top_K=8)


# =============================================================================
# Experiment Config Fixtures
# =============================================================================

SMALL_BLOCKS = {
    "power-ratio": {
        "power_ratio": {
            "ports_vertical": 1,
            "ports_horizontal": 4,
            "units": 4,
            "k_values": [1, 4, 16, 32],
            "covariance_snapshots": 4,
        }
    },
    "srs-mse": {"srs_mse": {"length_M": 31, "transmissions_N": 8, "max_tap": 6}},
    "cjt-sinr": {
        "cjt_sinr": {
            "drop": {"ue_count": 2, "array": {"ports_horizontal": 2, "polarizations": 2}, "grid": {"units": 4}},
            "feedbacks": ["ideal", "etype2"],
            "settings": {"beams_L": 1, "delay_dim_Z": 2, "top_K": 4},
        }
    },
    "predict": {
        "predict": {"ports_horizontal": 2, "units": 4, "snapshots_N": 8, "future_M": 2, "pairs_K": 16}
    },
    "beam-sim": {"beam_sim": {"sample_count": 8}},
    "upt": {},
    "occ": {"occ": {"delay_spreads_ns": [50.0, 400.0]}},
}


@pytest.fixture
def small_config():
    """Factory for fast ExperimentConfig instances."""

    def _make(experiment: str, drops: int = 2, seed: int = 11, **top) -> ExperimentConfig:
        data = {"experiment": experiment, "drops": drops, "seed": seed, **SMALL_BLOCKS[experiment], **top}
        return ExperimentConfig.model_validate(data)

    return _make
