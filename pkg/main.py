"""
mimolab - CLI Entry Point

Run massive-MIMO link experiments and write their results as CSV.

Usage:
    mimolab power-ratio --drops 500 --out power_ratio.csv
    mimolab srs-mse --config configs/srs_mse.toml --seed 7
    mimolab beam-sim --config configs/hst.toml -v
    mimolab upt --bursts bursts.csv
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from common.config import load_config
from common.errors import ConfigError
from common.logging import configure_logging, get_logger
from experiments import run_experiment
from models.experiment import ExperimentConfig
from services.config_loader import apply_overrides, load_config_file, parse_config
from services.result_writer import write_table

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

SUBCOMMANDS = {
    "power-ratio": "Energy of the K strongest angle-delay coefficients, DFT vs eigen bases",
    "srs-mse": "SRS channel estimation error with and without cyclic-shift hopping",
    "cjt-sinr": "Single-TRP vs coherent joint transmission SINR",
    "predict": "Doppler-based CSI prediction vs stale CSI",
    "beam-sim": "DCI vs MAC-CE beam indication along a trajectory",
    "upt": "User perceived throughput of a burst log",
    "occ": "DMRS OCC-2 vs OCC-4 port leakage over delay spread",
}


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per experiment."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=Path, help="TOML experiment config")
    common.add_argument("--seed", "-s", type=int, help="Master seed (overrides the config)")
    common.add_argument("--drops", "-n", type=int, help="Number of drops (overrides the config)")
    common.add_argument("--workers", "-w", type=int, help="Parallel drop workers")
    common.add_argument("--out", "-o", help="Output CSV path (default: stdout)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable DEBUG logging")

    parser = argparse.ArgumentParser(
        prog="mimolab",
        description="Massive-MIMO link simulation experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  mimolab power-ratio --drops 500 --out power_ratio.csv
  mimolab srs-mse --config configs/srs_mse.toml --seed 7
  mimolab beam-sim --config configs/duh.toml -v
  mimolab upt --bursts bursts.csv

Exit codes: 0 success, 1 configuration error, 2 runtime error.
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="EXPERIMENT")
    for name, help_text in SUBCOMMANDS.items():
        cmd = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "upt":
            cmd.add_argument("--bursts", "-b", type=Path, help="Burst log CSV (size_bits, duration_s)")
    return parser


def resolve_config(args: argparse.Namespace, defaults: dict) -> ExperimentConfig:
    """
    Config precedence: flags > config file > environment > model defaults.

    Raises:
        ConfigError: Unreadable or invalid config, or invalid overrides
    """
    if args.config is not None:
        config = load_config_file(args.config, args.command, defaults)
    else:
        config = parse_config("", args.command, defaults)
    config = apply_overrides(config, seed=args.seed, drops=args.drops, workers=args.workers)
    bursts = getattr(args, "bursts", None)
    if bursts is not None:
        config = config.model_copy(
            update={"upt": config.upt.model_copy(update={"bursts_path": str(bursts)})}
        )
    return config


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the experiment and return the exit code."""
    args = build_parser().parse_args(argv)

    try:
        env = load_config()
    except ConfigError as e:
        configure_logging(level="INFO")
        get_logger("mimolab.cli").error("config_invalid", key_path=e.key_path, error=e.message)
        return EXIT_CONFIG

    configure_logging(level="DEBUG" if args.verbose else env.log_level, fmt=env.log_format)
    logger = get_logger("mimolab.cli")

    try:
        config = resolve_config(args, {"seed": env.default_seed, "workers": env.workers})
    except ConfigError as e:
        logger.error("config_invalid", key_path=e.key_path, error=e.message)
        return EXIT_CONFIG

    try:
        table = run_experiment(config)
        write_table(table, args.out)
    except ConfigError as e:
        logger.error("config_invalid", key_path=e.key_path, error=e.message)
        return EXIT_CONFIG
    except Exception as e:
        logger.error("run_failed", experiment=config.experiment, error=str(e), error_type=type(e).__name__)
        return EXIT_RUNTIME
    return EXIT_OK


def run_cli() -> None:
    """Console-script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    run_cli()
