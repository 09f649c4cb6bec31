import logging
import sys
from argparse import ArgumentParser, Namespace
from typing import Optional, Sequence

from .. import CONF
from ..sim.sequences import SequenceParseError
from .commands import (
    EXIT_USAGE,
    SWEEP_AXES,
    cmd_budget,
    cmd_chi,
    cmd_fidelity,
    cmd_run,
    cmd_sweep,
    cmd_truth_table,
    cmd_unitary,
)
from .config import get_presets, resolve_config
from .output import emit
from .types import CommandOutput, RunConfig

logger = logging.getLogger(__name__)

# CLI flag -> RunConfig key
FLAGS = {
    "epsilon": float,
    "next_neighbor_ratio": float,
    "detuning_hz": float,
    "omega_sb_hz": float,
    "omega_carrier_hz": float,
    "qubit_prep_error": float,
    "motional_prep_error": float,
    "nmax": int,
    "shots": int,
    "samples": int,
    "seed": int,
    "workers": int,
}


def parse_values(text: str) -> list[float]:
    return [float(v) for v in text.replace(",", " ").split()]


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    for key, convert in FLAGS.items():
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=convert)
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--out", help="Output file (default: standard output)")
    common.add_argument("--sequence", help="Sequence file, or builtin:toffoli")
    common.add_argument(
        "--preset", help=f"Named preset ({', '.join(get_presets()) or 'none'})"
    )
    common.add_argument(
        "-v", "--verbose", action="store_true", default=None, help="Debug logging"
    )

    parser = ArgumentParser(
        prog="iontoffoli",
        description="Pulse-level simulation of the trapped-ion Toffoli gate",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser(
        "unitary", parents=[common], help="Compare the sequence with the Toffoli gate"
    )
    commands.add_parser("truth-table", parents=[common], help="Truth table")
    chi = commands.add_parser("chi", parents=[common], help="Process matrix")
    chi.add_argument(
        "--complex", action="store_true", default=None, help="Also emit complex chi"
    )
    commands.add_parser("fidelity", parents=[common], help="Mean gate fidelity")
    sweep = commands.add_parser("sweep", parents=[common], help="Noise sweep")
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True)
    sweep.add_argument(
        "--values",
        type=parse_values,
        required=True,
        help="Comma-separated values (epsilon ratios, or detunings in Hz)",
    )
    commands.add_parser("budget", parents=[common], help="Error budget")
    run = commands.add_parser(
        "run", parents=[common], help="Unitary check, truth table and fidelity"
    )
    run.add_argument("file", help="Sequence file")
    return parser


def configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def dispatch(args: Namespace, config: RunConfig) -> CommandOutput:
    if args.command == "unitary":
        return cmd_unitary(config)
    if args.command == "truth-table":
        return cmd_truth_table(config)
    if args.command == "chi":
        return cmd_chi(config)
    if args.command == "fidelity":
        return cmd_fidelity(config)
    if args.command == "sweep":
        return cmd_sweep(config, args.axis, args.values)
    if args.command == "budget":
        return cmd_budget(config)
    return cmd_run(config, args.file)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {
        key: getattr(args, key, None)
        for key in (*FLAGS, "format", "out", "sequence", "verbose", "complex")
    }
    try:
        config = resolve_config(flags, args.preset, CONF)
    except (KeyError, ValueError) as e:
        configure_logging(bool(args.verbose))
        logger.error(f"Invalid configuration: {e}")
        return EXIT_USAGE
    configure_logging(config["verbose"])

    try:
        output = dispatch(args, config)
    except (SequenceParseError, OSError, IndexError, KeyError, ValueError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    emit(config, output)
    return output["status"]
