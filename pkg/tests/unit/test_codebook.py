"""
Unit tests for the Type-I, eType-II, CJT and Doppler codebooks and the
power-ratio metric.
"""

import itertools

import numpy as np
import pytest

from common.errors import CodebookError, DegenerateChannelError, DimensionError
from models.channel import ArrayConfig, ChannelSnapshot
from models.codebook import CjtConfig, DopplerConfig, EType2Config, Type1Config
from phy.channel import dft_basis, eigen_basis
from phy.codebook import (
    AMPLITUDE_LEVELS,
    cjt_compress,
    cjt_reconstruct,
    doppler_compress,
    doppler_reconstruct,
    etype2_compress,
    etype2_matrix,
    etype2_reconstruct,
    power_ratio,
    power_ratio_curve,
    quantize_coefficient,
    quantize_report,
    type1_codeword,
    type1_quantize,
)
from tests.conftest import complex_normal


# =============================================================================
# Quantizer
# =============================================================================

class TestQuantizer:
    """Tests for the amp8-psk16 coefficient quantizer."""

    def test_idempotent(self, rng):
        """Quantizing a quantized value returns it unchanged."""
        for value in complex_normal(rng, 50):
            q = quantize_coefficient(complex(value))
            assert quantize_coefficient(q) == q

    def test_unit_stays_unit(self):
        """The strongest (unit) coefficient is exactly representable."""
        assert quantize_coefficient(1.0 + 0.0j) == pytest.approx(1.0 + 0.0j)

    def test_zero(self):
        """Zero maps to zero."""
        assert quantize_coefficient(0j) == 0j

    def test_small_amplitude_clipped(self):
        """Amplitudes below the table clip to the smallest level."""
        q = quantize_coefficient(1e-6)
        assert abs(q) == pytest.approx(10.0 ** (-1.5 * (AMPLITUDE_LEVELS - 1) / 20.0))

    def test_none_is_identity(self, random_channel, compact_etype2):
        """The 'none' quantizer returns the report untouched."""
        report = etype2_compress(random_channel, compact_etype2)
        assert quantize_report(report, "none") is report

    def test_report_quantization_idempotent(self, random_channel, full_etype2):
        """Quantizing an already quantized report changes nothing."""
        once = quantize_report(etype2_compress(random_channel, full_etype2), "amp8-psk16")
        twice = quantize_report(once, "amp8-psk16")
        assert twice.blocks == once.blocks


# =============================================================================
# Type-I
# =============================================================================

class TestType1:
    """Tests for Type-I codeword search."""

    def test_recovers_codeword(self):
        """A channel equal to a codeword selects that codeword."""
        cfg = Type1Config(ports=8)
        h = type1_codeword(cfg, 5, 0, 2)
        result = type1_quantize(h, cfg)
        assert result.beam == (5, 0)
        assert result.cophase_index == 2
        assert result.gain == pytest.approx(1.0)
        assert result.report.spatial_indices == [(5, 21)]

    def test_rank_two_orthogonal_layers(self, random_channel):
        """Rank-2 codewords have orthogonal unit-power layers."""
        cfg = Type1Config(ports=8, rank=2)
        w = type1_quantize(random_channel, cfg).beamformer
        gram = w.conj().T @ w
        np.testing.assert_allclose(gram, np.eye(2) / 2, atol=1e-12)

    @pytest.mark.parametrize("beams_in_group", [1, 4])
    def test_matches_exhaustive_search(self, rng, beams_in_group):
        """The selected gain equals the best codeword over every beam and co-phase."""
        cfg = Type1Config(ports=4, beams_in_group=beams_in_group)
        h = complex_normal(rng, 4, 6)
        best = max(
            float(np.sum(np.abs(h.conj().T @ type1_codeword(cfg, l, 0, n)) ** 2))
            for l in range(cfg.n_horizontal * cfg.oversampling)
            for n in range(cfg.cophase_levels)
        )
        assert type1_quantize(h, cfg).gain == pytest.approx(best, rel=1e-12)

    def test_two_port_cophase(self, rng):
        """With two ports the co-phase maximizes |conj(a) + conj(b) phi_n|^2."""
        cfg = Type1Config(ports=2, oversampling=1)
        phases = np.exp(2j * np.pi * np.arange(4) / 4)
        for _ in range(10):
            a, b = complex_normal(rng, 2)
            expected = int(np.argmax(np.abs(np.conj(a) + np.conj(b) * phases) ** 2))
            result = type1_quantize(np.array([[a], [b]]), cfg)
            assert result.cophase_index == expected

    def test_port_mismatch(self, random_channel):
        """P must match the codebook."""
        with pytest.raises(DimensionError):
            type1_quantize(random_channel, Type1Config(ports=16))


# =============================================================================
# Enhanced Type-II
# =============================================================================

class TestEType2:
    """Tests for eType-II compression and reconstruction."""

    def test_full_configuration_is_lossless(self, random_channel, full_etype2):
        """Keeping every beam, delay and coefficient reproduces the input."""
        report = etype2_compress(random_channel, full_etype2)
        np.testing.assert_allclose(etype2_matrix(report), random_channel, atol=1e-10)

    def test_compact_report_shape(self, random_channel, compact_etype2):
        """2L paired spatial columns, Z delay columns, at most K coefficients."""
        report = etype2_compress(random_channel, compact_etype2)
        (spatial,) = report.spatial_indices
        assert len(spatial) == 4
        assert spatial[2:] == tuple(i + 4 for i in spatial[:2])
        assert len(report.frequency_indices[0]) == 3
        assert report.coefficient_count(0) <= 8
        assert max(abs(c[3]) for c in report.coefficients) == pytest.approx(1.0)

    def test_reconstruct_column(self, random_channel, compact_etype2):
        """W^(x) is column x of the full reconstruction."""
        report = etype2_compress(random_channel, compact_etype2)
        np.testing.assert_allclose(etype2_reconstruct(report, 2)[:, 0], etype2_matrix(report)[:, 2])

    def test_reconstruct_out_of_range(self, random_channel, compact_etype2):
        """Frequency units outside [0, F) are rejected."""
        report = etype2_compress(random_channel, compact_etype2)
        with pytest.raises(CodebookError):
            etype2_reconstruct(report, 6)
        with pytest.raises(CodebookError):
            etype2_reconstruct(report, -1)

    def test_quantized_report(self, random_channel):
        """Quantized coefficients lie on the amp8-psk16 grid."""
        cfg = EType2Config(
            ports=8, beams_L=2, freq_units_F=6, delay_dim_Z=3, top_K=8, quantizer="amp8-psk16"
        )
        report = etype2_compress(random_channel, cfg)
        assert report.quantizer_id == "amp8-psk16"
        for _, _, _, value in report.coefficients:
            assert quantize_coefficient(value) == value

    def test_two_layers_share_spatial_basis(self, rng):
        """Layers share W_1 but keep their own coefficients."""
        cfg = EType2Config(ports=8, beams_L=2, freq_units_F=6, delay_dim_Z=3, top_K=6, layers=2)
        report = etype2_compress(complex_normal(rng, 2, 8, 6), cfg)
        assert report.block(0, 0).spatial_indices == report.block(0, 1).spatial_indices
        assert etype2_reconstruct(report, 0).shape == (8, 2)

    def test_matches_dense_selection(self, random_channel):
        """Reconstruction equals project, keep 2L beams and Z delays, truncate to K."""
        cfg = EType2Config(ports=8, beams_L=2, freq_units_F=6, fraction_p=0.5, top_K=6)
        assert cfg.delay_dim == 3
        dft4 = np.exp(2j * np.pi * np.outer(np.arange(4), np.arange(4)) / 4) / 2.0
        w1 = np.kron(np.eye(2), dft4)
        wf = np.exp(2j * np.pi * np.outer(np.arange(6), np.arange(6)) / 6) / np.sqrt(6)
        c = w1.conj().T @ random_channel @ wf

        row_power = np.sum(np.abs(c) ** 2, axis=1)
        beams = sorted(sorted(range(4), key=lambda b: -(row_power[b] + row_power[b + 4]))[:2])
        rows = beams + [b + 4 for b in beams]
        col_power = np.sum(np.abs(c[rows, :]) ** 2, axis=0)
        cols = sorted(sorted(range(6), key=lambda f: -col_power[f])[:3])
        selected = c[np.ix_(rows, cols)]
        threshold = np.sort(np.abs(selected).ravel())[-6]
        truncated = np.where(np.abs(selected) >= threshold, selected, 0.0)
        expected = w1[:, rows] @ truncated @ wf[:, cols].conj().T

        report = etype2_compress(random_channel, cfg)
        assert report.spatial_indices == [tuple(rows)]
        assert report.frequency_indices == [tuple(cols)]
        np.testing.assert_allclose(etype2_matrix(report), expected, atol=1e-10)

    def test_error_non_increasing_in_k(self, random_channel):
        """Keeping more coefficients never increases the reconstruction error."""
        errors = []
        for k in range(1, 13):
            cfg = EType2Config(ports=8, beams_L=2, freq_units_F=6, delay_dim_Z=3, top_K=k)
            w = etype2_matrix(etype2_compress(random_channel, cfg))
            errors.append(float(np.sum(np.abs(w - random_channel) ** 2)))
        assert all(later <= earlier + 1e-10 for earlier, later in zip(errors, errors[1:]))

    def test_too_many_layers(self, rng, compact_etype2):
        """More layers than configured is a codebook error."""
        with pytest.raises(CodebookError):
            etype2_compress(complex_normal(rng, 2, 8, 6), compact_etype2)

    def test_shape_mismatch(self, rng, compact_etype2):
        """P x F must match the configuration."""
        with pytest.raises(DimensionError):
            etype2_compress(complex_normal(rng, 8, 5), compact_etype2)


# =============================================================================
# Multi-TRP
# =============================================================================

class TestCjt:
    """Tests for multi-TRP coherent joint transmission compression."""

    def test_single_trp_matches_etype2(self, random_channel, compact_etype2):
        """With one TRP the CJT codebook reduces to eType-II."""
        cfg = CjtConfig(trp_count=1, ports_per_trp=8, per_trp_beams=[2], per_trp_freq=[3], per_trp_topK=[8])
        cjt = cjt_compress(random_channel, cfg)
        et = etype2_compress(random_channel, compact_etype2)
        assert cjt.blocks == et.blocks

    def test_full_two_trp_is_lossless(self, rng):
        """Keeping everything reproduces the stacked channel."""
        cfg = CjtConfig(
            trp_count=2, ports_per_trp=8, per_trp_beams=[4, 4], per_trp_freq=[6, 6], per_trp_topK=[48, 48]
        )
        h = complex_normal(rng, 16, 6)
        np.testing.assert_allclose(cjt_reconstruct(cjt_compress(h, cfg)), h, atol=1e-10)

    def test_joint_frequency_basis(self, rng):
        """Joint mode picks one set of frequency columns for every TRP."""
        cfg = CjtConfig(
            trp_count=3,
            ports_per_trp=4,
            per_trp_beams=[1, 1, 1],
            per_trp_freq=[2, 2, 2],
            per_trp_topK=[3, 2, 4],
            joint_frequency_basis=True,
        )
        report = cjt_compress(complex_normal(rng, 12, 6), cfg)
        assert len(set(report.frequency_indices)) == 1
        assert [report.coefficient_count(n) for n in range(3)] == [3, 2, 4]

    def test_joint_basis_is_best_subset(self, rng):
        """Identical TRP blocks: the joint columns are the per-TRP choice and the best M-subset."""
        block = complex_normal(rng, 4, 6)
        h = np.vstack([block, block])
        common = dict(trp_count=2, ports_per_trp=4, per_trp_beams=[1, 1], per_trp_freq=[2, 2], per_trp_topK=[2, 2])
        joint = cjt_compress(h, CjtConfig(joint_frequency_basis=True, **common))
        separate = cjt_compress(h, CjtConfig(**common))
        assert joint.frequency_indices == separate.frequency_indices

        rows = list(joint.spatial_indices[0])
        basis = dft_basis(ArrayConfig(ports_horizontal=2, polarizations=2), 6)
        coefficients = basis.spatial.conj().T @ block @ basis.frequency
        col_power = np.sum(np.abs(coefficients[rows, :]) ** 2, axis=0)
        best = max(itertools.combinations(range(6), 2), key=lambda cols: col_power[list(cols)].sum())
        assert joint.frequency_indices[0] == tuple(best)

    def test_eigen_bases(self, rng):
        """Per-TRP eigen bases are used unpaired and round-trip losslessly when full."""
        h = complex_normal(rng, 8, 4)
        bases = [eigen_basis([ChannelSnapshot(matrix=h[:4])]), eigen_basis([ChannelSnapshot(matrix=h[4:])])]
        cfg = CjtConfig(
            trp_count=2, ports_per_trp=4, per_trp_beams=[2, 2], per_trp_freq=[4, 4], per_trp_topK=[16, 16]
        )
        report = cjt_compress(h, cfg, bases)
        assert report.basis_kind == "eigen"
        np.testing.assert_allclose(cjt_reconstruct(report, bases), h, atol=1e-10)

    def test_row_mismatch(self, rng):
        """Stacked rows must equal trp_count x ports_per_trp."""
        cfg = CjtConfig(trp_count=2, ports_per_trp=8, per_trp_beams=[2, 2], per_trp_freq=[2, 2], per_trp_topK=[4, 4])
        with pytest.raises(DimensionError):
            cjt_compress(complex_normal(rng, 12, 6), cfg)


# =============================================================================
# Power ratio
# =============================================================================

class TestPowerRatio:
    """Tests for power_ratio and power_ratio_curve."""

    def test_all_coefficients(self, random_channel, dual_pol_array, small_grid):
        """K = P N_f captures all the energy."""
        basis = dft_basis(dual_pol_array, small_grid)
        assert power_ratio(random_channel, basis, 48) == pytest.approx(1.0)

    def test_curve_monotone(self, random_channel, dual_pol_array, small_grid):
        """r(K) is non-decreasing and agrees with power_ratio."""
        basis = dft_basis(dual_pol_array, small_grid)
        ks = list(range(1, 49))
        curve = power_ratio_curve(random_channel, basis, ks)
        assert np.all(np.diff(curve) >= 0)
        assert curve[9] == pytest.approx(power_ratio(random_channel, basis, 10))

    def test_k_out_of_range(self, random_channel, dual_pol_array, small_grid):
        """K must lie in [1, P N_f]."""
        basis = dft_basis(dual_pol_array, small_grid)
        with pytest.raises(CodebookError):
            power_ratio(random_channel, basis, 0)
        with pytest.raises(CodebookError):
            power_ratio_curve(random_channel, basis, [1, 49])

    def test_single_snapshot_eigen_dominates_dft(self, random_channel, dual_pol_array, small_grid):
        """Eigen bases of the channel itself concentrate at least as much power for every K."""
        ks = list(range(1, 49))
        eigen = power_ratio_curve(random_channel, eigen_basis([ChannelSnapshot(matrix=random_channel)]), ks)
        dft = power_ratio_curve(random_channel, dft_basis(dual_pol_array, small_grid), ks)
        assert np.all(eigen >= dft - 1e-12)

    def test_zero_channel(self, dual_pol_array, small_grid):
        """The ratio of a zero channel is undefined."""
        with pytest.raises(DegenerateChannelError, match="undefined ratio"):
            power_ratio(np.zeros((8, 6)), dft_basis(dual_pol_array, small_grid), 1)


# =============================================================================
# Doppler codebook
# =============================================================================

class TestDopplerCodebook:
    """Tests for the space-frequency-time codebook."""

    def _config(self, time_basis: int, top_k: int) -> DopplerConfig:
        et = EType2Config(ports=8, beams_L=4, freq_units_F=3, delay_dim_Z=3, top_K=24)
        return DopplerConfig(slots_N_slot=2, time_basis_T=time_basis, etype2=et, top_K=top_k)

    def test_full_configuration_is_lossless(self, rng):
        """Every beam, delay, Doppler and coefficient kept reproduces the input."""
        predicted = complex_normal(rng, 8, 6)
        report = doppler_compress(predicted, self._config(2, 48))
        np.testing.assert_allclose(doppler_reconstruct(report), predicted, atol=1e-10)

    def test_static_channel_needs_one_time_column(self, rng):
        """A channel constant over slots lives in the zero-Doppler column."""
        h = complex_normal(rng, 8, 3)
        predicted = np.repeat(h, 2, axis=1)
        report = doppler_compress(predicted, self._config(1, 24))
        assert report.block(0, 0).time_indices == (0,)
        np.testing.assert_allclose(doppler_reconstruct(report), predicted, atol=1e-10)

    def test_positive_doppler_selects_matching_column(self, rng):
        """A channel rotating at +250 Hz over 8 slots of 1 ms lives in time column 2."""
        h = complex_normal(rng, 8, 3)
        slots = 8
        predicted = np.zeros((8, 3 * slots), dtype=np.complex128)
        for f in range(3):
            for s in range(slots):
                predicted[:, f * slots + s] = h[:, f] * np.exp(2j * np.pi * 250.0 * s * 1e-3)
        et = EType2Config(ports=8, beams_L=4, freq_units_F=3, delay_dim_Z=3, top_K=24)
        cfg = DopplerConfig(slots_N_slot=slots, time_basis_T=1, etype2=et, top_K=24)
        report = doppler_compress(predicted, cfg)
        assert report.block(0, 0).time_indices == (2,)
        np.testing.assert_allclose(doppler_reconstruct(report), predicted, atol=1e-10)

    def test_shape_mismatch(self, rng):
        """Input columns must equal F x N_slot."""
        with pytest.raises(DimensionError):
            doppler_compress(complex_normal(rng, 8, 5), self._config(1, 4))
