"""
Unit tests for Pydantic models.

Tests validation, derived properties and edge cases for all data models.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.beams import BeamGrid, EmpiricalCdf, IndicationModel, Trajectory
from models.channel import ArrayConfig, BasisPair, ChannelSnapshot, FrequencyGrid, PathCluster
from models.codebook import (
    CjtConfig,
    Coefficient,
    DopplerConfig,
    EType2Config,
    PrecoderReport,
    ReportBlock,
    Type1Config,
)
from models.evaluation import DropParams, OccConfig
from models.experiment import SCHEMAS, ExperimentConfig, ResultTable
from models.prediction import PredictionConfig
from models.srs import CsSchedule, SrsResourceMap


# =============================================================================
# Channel Model Tests
# =============================================================================

class TestArrayConfig:
    """Tests for ArrayConfig."""

    def test_total_ports(self):
        """P is the product of rows, columns and polarizations."""
        array = ArrayConfig(ports_vertical=2, ports_horizontal=8, polarizations=2)
        assert array.block_ports == 16
        assert array.total_ports == 32

    def test_rejects_zero_ports(self):
        """Port counts must be positive."""
        with pytest.raises(ValidationError):
            ArrayConfig(ports_horizontal=0)

    def test_rejects_three_polarizations(self):
        """Only one or two polarization blocks exist."""
        with pytest.raises(ValidationError):
            ArrayConfig(polarizations=3)


class TestPathCluster:
    """Tests for PathCluster."""

    def test_gain_coerced_to_complex(self):
        """Real gains are stored as complex."""
        assert PathCluster(gain=2.0).gain == complex(2.0, 0.0)

    def test_rejects_non_finite_gain(self):
        """Gains must be finite."""
        with pytest.raises(ValidationError):
            PathCluster(gain=complex(math.inf, 0.0))

    def test_rejects_negative_delay(self):
        """Delays are non-negative."""
        with pytest.raises(ValidationError):
            PathCluster(gain=1.0, delay_s=-1e-9)


class TestFrequencyGrid:
    """Tests for FrequencyGrid."""

    def test_tau_max(self):
        """Largest representable delay is the inverse unit spacing."""
        assert FrequencyGrid(unit_spacing_hz=1e6).tau_max == pytest.approx(1e-6)


class TestChannelSnapshot:
    """Tests for ChannelSnapshot."""

    def test_matrix_is_read_only(self):
        """Stored matrices cannot be modified in place."""
        snap = ChannelSnapshot(matrix=np.ones((2, 3)))
        with pytest.raises(ValueError):
            snap.matrix[0, 0] = 5.0

    def test_shape_properties(self):
        """ports and units follow the matrix shape."""
        snap = ChannelSnapshot(matrix=np.zeros((4, 7)))
        assert (snap.ports, snap.units) == (4, 7)

    def test_rejects_vector(self):
        """Snapshots are two-dimensional."""
        with pytest.raises(ValidationError):
            ChannelSnapshot(matrix=np.ones(4))

    def test_rejects_nan(self):
        """Non-finite entries are rejected."""
        with pytest.raises(ValidationError):
            ChannelSnapshot(matrix=np.array([[np.nan]]))


class TestBasisPair:
    """Tests for BasisPair."""

    def test_identity_is_valid(self):
        """Identity matrices are unitary."""
        pair = BasisPair(spatial=np.eye(4), frequency=np.eye(3), kind="dft")
        assert pair.spatial.shape == (4, 4)

    def test_rejects_non_unitary(self):
        """A scaled identity is not unitary."""
        with pytest.raises(ValidationError, match="unitary"):
            BasisPair(spatial=2 * np.eye(4), frequency=np.eye(3), kind="dft")

    def test_rejects_non_square(self):
        """Bases are square."""
        with pytest.raises(ValidationError, match="square"):
            BasisPair(spatial=np.eye(4)[:, :3], frequency=np.eye(3), kind="eigen")


# =============================================================================
# Codebook Model Tests
# =============================================================================

class TestCodebookConfigs:
    """Tests for codebook configuration validators."""

    def test_type1_layout(self):
        """N1 follows from P = 2 N1 N2."""
        cfg = Type1Config(ports=16, n_vertical=2)
        assert cfg.n_horizontal == 4

    def test_type1_rejects_odd_layout(self):
        """P must split into two polarizations of N1 x N2."""
        with pytest.raises(ValidationError):
            Type1Config(ports=6, n_vertical=2)

    def test_etype2_delay_dim_from_fraction(self):
        """Z = ceil(p F / phi)."""
        cfg = EType2Config(ports=8, beams_L=2, freq_units_F=13, fraction_p=0.25, top_K=4)
        assert cfg.delay_dim == 4

    def test_etype2_rejects_too_many_beams(self):
        """L is bounded by ports per polarization."""
        with pytest.raises(ValidationError, match="beams_L"):
            EType2Config(ports=8, beams_L=5, freq_units_F=4, top_K=1)

    def test_etype2_rejects_too_many_coefficients(self):
        """K <= 2 L Z."""
        with pytest.raises(ValidationError, match="top_K"):
            EType2Config(ports=8, beams_L=2, freq_units_F=4, delay_dim_Z=2, top_K=9)

    def test_etype2_rejects_nine_layers(self):
        """At most eight layers."""
        with pytest.raises(ValidationError):
            EType2Config(ports=8, beams_L=2, freq_units_F=4, top_K=4, layers=9)

    def test_cjt_list_lengths(self):
        """Per-TRP lists must have trp_count entries."""
        with pytest.raises(ValidationError, match="per_trp_beams"):
            CjtConfig(
                trp_count=2,
                ports_per_trp=8,
                per_trp_beams=[2],
                per_trp_freq=[2, 2],
                per_trp_topK=[4, 4],
            )

    def test_cjt_joint_basis_needs_equal_sizes(self):
        """A common frequency basis needs one M for all TRPs."""
        with pytest.raises(ValidationError, match="joint_frequency_basis"):
            CjtConfig(
                trp_count=2,
                ports_per_trp=8,
                per_trp_beams=[2, 2],
                per_trp_freq=[2, 3],
                per_trp_topK=[4, 4],
                joint_frequency_basis=True,
            )

    def test_doppler_time_basis_bounded(self):
        """T cannot exceed the number of slots."""
        et = EType2Config(ports=8, beams_L=2, freq_units_F=4, top_K=4)
        with pytest.raises(ValidationError, match="time_basis_T"):
            DopplerConfig(slots_N_slot=2, time_basis_T=3, etype2=et)

    def test_doppler_coefficients_default_to_etype2(self):
        """K defaults to the eType-II K."""
        et = EType2Config(ports=8, beams_L=2, freq_units_F=4, top_K=5)
        assert DopplerConfig(slots_N_slot=4, etype2=et).coefficients_K == 5


class TestPrecoderReport:
    """Tests for ReportBlock and PrecoderReport."""

    def _block(self, **overrides):
        data = dict(
            spatial_indices=(0, 4),
            frequency_indices=(1,),
            scale=0.5 + 0.5j,
            coefficients=(
                Coefficient(row=0, col=0, value=1.0),
                Coefficient(row=1, col=0, value=0.3j),
            ),
        )
        data.update(overrides)
        return ReportBlock(**data)

    def test_derived_views(self):
        """Spec-level views are derived from the blocks."""
        report = PrecoderReport(kind="etype2", ports=8, freq_units=4, blocks=(self._block(),))
        assert report.spatial_indices == [(0, 4)]
        assert report.frequency_indices == [(1,)]
        assert report.coefficients == [(0, 0, 0, 1 + 0j), (0, 1, 0, 0.3j)]
        assert report.coefficient_count(0) == 2

    def test_coefficient_outside_selection(self):
        """Coefficients must address selected columns."""
        with pytest.raises(ValidationError, match="outside"):
            self._block(coefficients=(Coefficient(row=2, col=0, value=1.0),))

    def test_strongest_must_be_unit(self):
        """Normalized coefficients peak at amplitude 1."""
        with pytest.raises(ValidationError, match="unit"):
            self._block(coefficients=(Coefficient(row=0, col=0, value=0.5),))

    def test_spatial_index_range(self):
        """Spatial indices stay inside the spatial dimension."""
        with pytest.raises(ValidationError, match="spatial index"):
            PrecoderReport(
                kind="etype2", ports=4, freq_units=4, blocks=(self._block(spatial_indices=(0, 4)),)
            )

    def test_block_lookup(self):
        """Missing blocks raise KeyError."""
        report = PrecoderReport(kind="etype2", ports=8, freq_units=4, blocks=(self._block(),))
        with pytest.raises(KeyError):
            report.block(0, 1)


# =============================================================================
# SRS / Prediction / Evaluation Model Tests
# =============================================================================

class TestSrsModels:
    """Tests for SRS models."""

    def test_cs_schedule_range(self):
        """Cyclic shifts lie in [0, 2 pi)."""
        with pytest.raises(ValidationError):
            CsSchedule(values=(2 * math.pi,))

    def test_infeasible_antenna_switching(self):
        """Ports must fit into tx_chains x symbols."""
        with pytest.raises(ValidationError, match="infeasible"):
            SrsResourceMap(ports=4, tx_chains=1, symbols=2)


class TestPredictionConfig:
    """Tests for PredictionConfig."""

    def test_nyquist(self):
        """The unambiguous Doppler range is 1 / (2 dt)."""
        assert PredictionConfig(slot_gap_dt=1e-3).nyquist_hz == pytest.approx(500.0)

    def test_aliasing_guard(self):
        """A Doppler at or above Nyquist is rejected."""
        with pytest.raises(ValidationError, match="aliases"):
            PredictionConfig(slot_gap_dt=1e-3, max_doppler_hz=500.0)


class TestEvaluationModels:
    """Tests for drop and OCC models."""

    def test_noise_power(self):
        """-174 dBm/Hz + 10 log10(20 MHz) + 9 dB NF is about -92 dBm."""
        expected = 10.0 ** ((-174.0 + 10.0 * math.log10(20e6) + 9.0) / 10.0)
        assert DropParams().noise_power_mw == pytest.approx(expected)

    def test_drop_params_forbid_unknown_keys(self):
        """Typos in drop parameters are errors."""
        with pytest.raises(ValidationError):
            DropParams(trp_cnt=3)

    def test_occ_port_counts(self):
        """OCC-2 supports 12 ports, OCC-4 supports 24."""
        assert OccConfig(occ_length=2).total_ports == 12
        assert OccConfig(occ_length=4).total_ports == 24


# =============================================================================
# Beam Model Tests
# =============================================================================

class TestBeamModels:
    """Tests for beam-indication models."""

    def test_trajectory_timing(self):
        """Sample interval is spacing over speed."""
        traj = Trajectory(waypoints=[(0, 0), (10, 0)], speed_mps=10.0, sample_spacing_m=1.0, sample_count=5)
        assert traj.sample_interval_s == pytest.approx(0.1)
        assert traj.duration_s == pytest.approx(0.4)

    def test_uniform_grid(self):
        """Uniform grids spread beams symmetrically over the sector."""
        grid = BeamGrid.uniform((0.0, 0.0), beam_count=4, sector_center=0.0, sector_width=math.pi)
        assert grid.beam_centers == pytest.approx((-3 * math.pi / 8, -math.pi / 8, math.pi / 8, 3 * math.pi / 8))
        assert grid.beamwidth == pytest.approx(math.pi / 4)

    def test_grid_center_count(self):
        """beam_centers must match beam_count."""
        with pytest.raises(ValidationError):
            BeamGrid(trp_position=(0, 0), beam_count=3, beam_centers=(0.0, 1.0), beamwidth=0.1)

    def test_default_mechanisms(self):
        """DCI is faster and more reliable than MAC-CE."""
        dci, mac = IndicationModel.dci(), IndicationModel.mac_ce()
        assert dci.latency_s < mac.latency_s
        assert dci.bler < mac.bler

    def test_bler_below_one(self):
        """A BLER of 1 would never deliver."""
        with pytest.raises(ValidationError):
            IndicationModel(mechanism="DCI", latency_s=1e-3, bler=1.0)

    def test_cdf_statistics(self):
        """Quantiles interpolate between order statistics."""
        cdf = EmpiricalCdf(values=[1.0, 2.0, 3.0, 4.0], probabilities=[0.25, 0.5, 0.75, 1.0])
        assert cdf.median == pytest.approx(2.5)
        assert cdf.mean == pytest.approx(2.5)
        assert cdf.probability_at(2.0) == pytest.approx(0.5)
        assert cdf.probability_at(0.5) == 0.0

    def test_cdf_must_be_sorted(self):
        """Values must be non-decreasing."""
        with pytest.raises(ValidationError):
            EmpiricalCdf(values=[2.0, 1.0], probabilities=[0.5, 1.0])


# =============================================================================
# Experiment Model Tests
# =============================================================================

class TestExperimentConfig:
    """Tests for ExperimentConfig and ResultTable."""

    def test_defaults_filled(self):
        """Only the experiment name is required."""
        config = ExperimentConfig(experiment="occ")
        assert config.drops == 1
        assert config.occ.occ_lengths == [2, 4]

    def test_unknown_top_level_key(self):
        """Unknown keys are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="occ", repetitions=3)

    def test_power_ratio_k_range(self):
        """K values cannot exceed P N_f."""
        with pytest.raises(ValidationError, match="k_values"):
            ExperimentConfig(experiment="power-ratio", power_ratio={"units": 1, "k_values": [33]})

    def test_srs_negative_noise(self):
        """Noise power must be positive."""
        with pytest.raises(ValidationError):
            ExperimentConfig(experiment="srs-mse", srs_mse={"noise_power": -1.0})

    def test_occ_subcarriers_multiple_of_twelve(self):
        """OCC allocations are whole resource blocks."""
        with pytest.raises(ValidationError, match="multiple of 12"):
            ExperimentConfig(experiment="occ", occ={"subcarriers": 30})

    def test_result_table_schema(self):
        """Headers must match the experiment schema."""
        with pytest.raises(ValidationError, match="schema"):
            ResultTable(experiment="upt", header=("a", "b"))

    def test_result_table_rectangular(self):
        """Rows must have one value per column."""
        with pytest.raises(ValidationError, match="row 0"):
            ResultTable(experiment="upt", header=SCHEMAS["upt"], rows=[(1, 2.0)])
