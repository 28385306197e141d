"""
Unit tests for services.

Tests config loading, seed derivation, CSV I/O and the precoder report codec.
"""

import os
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest

from common.config import load_config
from common.errors import CodebookError, ConfigError, OutputError
from models.channel import ChannelSnapshot
from models.codebook import EType2Config, Type1Config
from models.experiment import SCHEMAS, ExperimentConfig, ResultTable
from phy.codebook import etype2_compress, type1_quantize
from services.config_loader import (
    apply_overrides,
    config_hash,
    load_config_file,
    parse_config,
    serialize_config,
)
from services.report_format import parse_report, read_report, serialize_report, write_report
from services.result_writer import (
    read_bursts,
    read_table,
    render_table,
    write_snapshot,
    write_table,
)
from services.seeding import derive_seed, drop_rng, splitmix64


# =============================================================================
# Environment Config Tests
# =============================================================================

class TestEnvironmentConfig:
    """Tests for process-level settings from the environment."""

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        """Unset variables fall back to defaults."""
        config = load_config()
        assert config.log_level == "INFO"
        assert config.log_format == "console"
        assert config.workers == 1
        assert config.default_seed == 0

    @patch.dict(os.environ, {"SIM_WORKERS": "4", "SIM_DEFAULT_SEED": "17", "LOG_FORMAT": "JSON"})
    def test_overrides(self):
        """Variables override defaults; choices are case-insensitive."""
        config = load_config()
        assert config.workers == 4
        assert config.default_seed == 17
        assert config.log_format == "json"

    @patch.dict(os.environ, {"SIM_WORKERS": "many"})
    def test_bad_integer(self):
        """Non-integer values name the variable."""
        with pytest.raises(ConfigError) as excinfo:
            load_config()
        assert excinfo.value.key_path == "SIM_WORKERS"

    @patch.dict(os.environ, {"SIM_WORKERS": "0"})
    def test_below_minimum(self):
        """At least one worker."""
        with pytest.raises(ConfigError):
            load_config()

    @patch.dict(os.environ, {"LOG_FORMAT": "xml"})
    def test_bad_choice(self):
        """Unknown log formats are rejected."""
        with pytest.raises(ConfigError, match="LOG_FORMAT"):
            load_config()


# =============================================================================
# Experiment Config Loader Tests
# =============================================================================

SRS_CONFIG = """
experiment = "srs-mse"
seed = 7
drops = 20

[srs_mse]
inr_db = [0.0, 10.0]
transmissions_N = 16
"""


class TestConfigLoader:
    """Tests for TOML experiment configs."""

    def test_parse(self):
        """Top-level keys and blocks are read; missing values get defaults."""
        config = parse_config(SRS_CONFIG)
        assert config.experiment == "srs-mse"
        assert config.seed == 7
        assert config.srs_mse.inr_db == [0.0, 10.0]
        assert config.srs_mse.length_M == 139
        assert config.workers == 1

    def test_round_trip(self):
        """parse(serialize(c)) == c."""
        config = parse_config(SRS_CONFIG)
        assert parse_config(serialize_config(config)) == config

    def test_round_trip_nested(self):
        """Nested drop and settings tables survive a round trip."""
        text = """
experiment = "cjt-sinr"
[cjt_sinr.drop]
trp_count = 3
[cjt_sinr.drop.array]
ports_horizontal = 2
polarizations = 2
[cjt_sinr.settings]
joint_frequency_basis = true
"""
        config = parse_config(text)
        assert config.cjt_sinr.drop.trp_count == 3
        assert parse_config(serialize_config(config)) == config

    def test_hash(self):
        """Equal configs hash equally, a changed seed changes the hash."""
        a = parse_config(SRS_CONFIG)
        b = parse_config(serialize_config(a))
        assert config_hash(a) == config_hash(b)
        assert len(config_hash(a)) == 64
        assert config_hash(apply_overrides(a, seed=8)) != config_hash(a)

    def test_error_key_path(self):
        """The first offending key is named by its dotted path."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config('experiment = "srs-mse"\n[srs_mse]\nnoise_power = -1.0\n')
        assert excinfo.value.key_path == "srs_mse.noise_power"

    def test_unknown_key(self):
        """Typos are reported, not ignored."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config('experiment = "occ"\n[occ]\nocc_lenghts = [2]\n')
        assert excinfo.value.key_path == "occ.occ_lenghts"

    def test_invalid_toml(self):
        """Malformed documents are configuration errors."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config("experiment = \n")
        assert excinfo.value.key_path == "<document>"

    def test_missing_experiment(self):
        """Without a CLI experiment the document must name one."""
        with pytest.raises(ConfigError) as excinfo:
            parse_config("seed = 1\n")
        assert excinfo.value.key_path == "experiment"

    def test_cli_experiment_fills_document(self):
        """The CLI experiment fills a missing key."""
        assert parse_config("seed = 1\n", "occ").experiment == "occ"

    def test_experiment_mismatch(self):
        """A config for another experiment is rejected."""
        with pytest.raises(ConfigError, match="requested"):
            parse_config(SRS_CONFIG, "occ")

    def test_defaults_yield_to_document(self):
        """Environment defaults only fill keys the document omits."""
        config = parse_config("seed = 3\n", "upt", defaults={"seed": 11, "workers": 2})
        assert config.seed == 3
        assert config.workers == 2

    def test_overrides(self):
        """None overrides are ignored, others re-validated."""
        config = parse_config(SRS_CONFIG)
        assert apply_overrides(config, seed=None, drops=None) is config
        updated = apply_overrides(config, drops=5, workers=None)
        assert updated.drops == 5
        assert updated.seed == 7
        with pytest.raises(ConfigError) as excinfo:
            apply_overrides(config, drops=-1)
        assert excinfo.value.key_path == "drops"

    def test_load_file(self, tmp_path):
        """Files are read as UTF-8 TOML."""
        path = tmp_path / "srs.toml"
        path.write_text(SRS_CONFIG, encoding="utf-8")
        assert load_config_file(path, "srs-mse").drops == 20

    def test_load_missing_file(self, tmp_path):
        """Unreadable files point at --config."""
        with pytest.raises(ConfigError) as excinfo:
            load_config_file(tmp_path / "absent.toml")
        assert excinfo.value.key_path == "--config"


# =============================================================================
# Seeding Tests
# =============================================================================

class TestSeeding:
    """Tests for per-drop seed derivation."""

    def test_known_values(self):
        """Matches the reference split-mix 64 stream seeded with 0."""
        assert derive_seed(0, 0) == 0xE220A8397B1DCDAF
        assert derive_seed(0, 1) == 0x6E789E6AA1B965F4

    def test_range(self):
        """Seeds are 64-bit."""
        for drop in range(10):
            assert 0 <= derive_seed(2**63 - 1, drop) < 2**64

    def test_distinct_drops(self):
        """Different drops get different seeds."""
        assert len({derive_seed(42, d) for d in range(1000)}) == 1000

    def test_negative(self):
        """Negative inputs are rejected."""
        with pytest.raises(ValueError):
            derive_seed(-1, 0)
        with pytest.raises(ValueError):
            derive_seed(0, -1)

    def test_splitmix_zero(self):
        """The finalizer maps zero to zero."""
        assert splitmix64(0) == 0

    def test_drop_rng(self):
        """Generators for the same drop agree."""
        assert drop_rng(5, 3).random() == drop_rng(5, 3).random()


# =============================================================================
# Result Writer Tests
# =============================================================================

@pytest.fixture
def upt_table() -> ResultTable:
    """Small upt table with full metadata."""
    return ResultTable(
        experiment="upt",
        header=SCHEMAS["upt"],
        rows=[(2, 3e6, 1.5, 2e6)],
        metadata={"tool_version": "0.1.0", "experiment": "upt", "seed": "0", "config_hash": "abc"},
    )


class TestResultWriter:
    """Tests for CSV result files."""

    def test_render_metadata_order(self, upt_table):
        """Metadata lines come first in a fixed key order."""
        lines = render_table(upt_table).splitlines()
        assert lines[:4] == ["# experiment=upt", "# seed=0", "# config_hash=abc", "# tool_version=0.1.0"]
        assert lines[4] == "bursts,total_bits,total_duration_s,upt_bps"

    def test_write_and_read(self, upt_table, tmp_path):
        """Files read back into metadata and rows."""
        path = tmp_path / "out" / "upt.csv"
        write_table(upt_table, path)
        metadata, frame = read_table(path)
        assert metadata["config_hash"] == "abc"
        assert list(frame.columns) == list(SCHEMAS["upt"])
        assert frame.loc[0, "upt_bps"] == pytest.approx(2e6)
        assert not [p for p in path.parent.iterdir() if p.name.endswith(".tmp")]

    def test_stdout(self, upt_table, capsys):
        """No path (or '-') writes to stdout."""
        write_table(upt_table, "-")
        assert capsys.readouterr().out == render_table(upt_table)

    def test_header_only(self, tmp_path):
        """Zero rows still write the header."""
        table = ResultTable(experiment="occ", header=SCHEMAS["occ"])
        path = tmp_path / "occ.csv"
        write_table(table, path)
        assert path.read_text(encoding="utf-8").strip() == ",".join(SCHEMAS["occ"])

    def test_unwritable(self, upt_table, tmp_path):
        """Write failures carry the path."""
        blocker = tmp_path / "file.txt"
        blocker.write_text("x", encoding="utf-8")
        with pytest.raises(OutputError) as excinfo:
            write_table(upt_table, blocker / "upt.csv")
        assert excinfo.value.path.endswith("upt.csv")

    def test_read_missing(self, tmp_path):
        """Missing result files raise OutputError."""
        with pytest.raises(OutputError):
            read_table(tmp_path / "absent.csv")


class TestBurstLog:
    """Tests for burst-log CSV input."""

    def test_read(self, tmp_path):
        """Comment lines are skipped."""
        path = tmp_path / "bursts.csv"
        path.write_text("# from the field trial\nsize_bits,duration_s\n1e6,0.5\n2e6,1.0\n", encoding="utf-8")
        bursts = read_bursts(path)
        assert [b.size_bits for b in bursts] == [1e6, 2e6]

    def test_missing_column(self, tmp_path):
        """Both columns are required."""
        path = tmp_path / "bursts.csv"
        path.write_text("size_bits\n1e6\n", encoding="utf-8")
        with pytest.raises(OutputError, match="duration_s"):
            read_bursts(path)

    def test_invalid_value(self, tmp_path):
        """Durations must be positive."""
        path = tmp_path / "bursts.csv"
        path.write_text("size_bits,duration_s\n1e6,0\n", encoding="utf-8")
        with pytest.raises(OutputError, match="invalid burst"):
            read_bursts(path)

    def test_missing_file(self, tmp_path):
        """Absent logs raise OutputError."""
        with pytest.raises(OutputError):
            read_bursts(tmp_path / "absent.csv")


class TestSnapshotDump:
    """Tests for channel snapshot CSV dumps."""

    def test_exact_values(self, random_channel, tmp_path):
        """Values survive the dump bit-exactly."""
        path = tmp_path / "snap.csv"
        write_snapshot(ChannelSnapshot(matrix=random_channel), path)
        frame = pd.read_csv(path, float_precision="round_trip")
        assert len(frame) == 48
        restored = (frame["re"].to_numpy() + 1j * frame["im"].to_numpy()).reshape(8, 6)
        np.testing.assert_array_equal(restored, random_channel)


# =============================================================================
# Report Format Tests
# =============================================================================

class TestReportFormat:
    """Tests for the precoder report text codec."""

    def test_etype2_round_trip(self, random_channel):
        """Quantized eType-II reports parse back unchanged."""
        cfg = EType2Config(ports=8, beams_L=2, freq_units_F=6, delay_dim_Z=3, top_K=8, quantizer="amp8-psk16")
        report = etype2_compress(random_channel, cfg)
        assert parse_report(serialize_report(report)) == report

    def test_type1_round_trip(self, random_channel):
        """The oversampled spatial dimension is carried along."""
        report = type1_quantize(random_channel, Type1Config(ports=8)).report
        text = serialize_report(report)
        assert "spatial_dimension=32" in text
        assert parse_report(text) == report

    def test_file_round_trip(self, random_channel, compact_etype2, tmp_path):
        """write_report / read_report."""
        report = etype2_compress(random_channel, compact_etype2)
        path = write_report(report, tmp_path / "report.txt")
        assert read_report(path) == report

    def test_missing_header(self):
        """Text must start with the report header."""
        with pytest.raises(CodebookError, match="header"):
            parse_report("report kind=etype2\n")

    def test_missing_fields(self):
        """The report record lists every required field."""
        with pytest.raises(CodebookError, match="missing fields"):
            parse_report("# mimolab precoder report\nreport kind=etype2 ports=8\n")

    def test_coefficient_before_block(self):
        """Coefficients belong to a block."""
        text = (
            "# mimolab precoder report\n"
            "report kind=etype2 quantizer=none basis=dft ports=8 n_vertical=1 "
            "freq_units=4 slots=1 trp_count=1 layers=1\n"
            "0,0,0,1.0,0.0\n"
        )
        with pytest.raises(CodebookError, match="before any block"):
            parse_report(text)

    def test_read_missing(self, tmp_path):
        """Absent report files raise OutputError."""
        with pytest.raises(OutputError):
            read_report(tmp_path / "absent.txt")
