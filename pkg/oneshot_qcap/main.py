import argparse
import sys
from typing import List, Optional

from oneshot_qcap.cli.command_base import CommandKind, RunConfig
from oneshot_qcap.cli.commands import COMMANDS
from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.divergences import SlackParams
from oneshot_qcap.core.errors import ExitCode, SlackError
from oneshot_qcap.core.verification import SUITES


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oneshot-qcap",
        description="One-shot public and private capacity regions of quantum wiretap channels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {QcapConfig.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    eps, eps_prime, delta, delta_prime, gamma = QcapConfig.DEFAULT_SLACKS
    for kind in CommandKind:
        cmd = sub.add_parser(kind.value, help=COMMANDS[kind].__doc__)
        cmd.add_argument("--input", help="JSON input document")
        cmd.add_argument("--output", help="CSV output path (stdout when omitted)")
        cmd.add_argument("--eps", type=float, default=eps)
        cmd.add_argument("--eps-prime", type=float, default=eps_prime)
        cmd.add_argument("--delta", type=float, default=delta)
        cmd.add_argument("--delta-prime", type=float, default=delta_prime)
        cmd.add_argument("--gamma", type=float, default=gamma)
        cmd.add_argument("--grid", type=int, default=2, help="encoder grid resolution")
        cmd.add_argument("--seed", type=int, default=QcapConfig.DEFAULT_SEED)
        cmd.add_argument("--dim-cap", type=int, default=None)
        cmd.add_argument("--svg", action="store_true", help="also write an SVG frontier plot")
        if kind is CommandKind.VERIFY:
            cmd.add_argument("--scale", type=float, default=1.0, help="multiplier for suite instance counts")
            cmd.add_argument("--suite", action="append", choices=sorted(SUITES), default=[])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Raises:
        SlackError: if the slack parameters violate their constraints
    """
    slacks = SlackParams(args.eps, args.eps_prime, args.delta, args.delta_prime, args.gamma)
    return RunConfig(
        command=args.command,
        input_path=args.input,
        output_path=args.output,
        slacks=slacks,
        grid=args.grid,
        seed=args.seed,
        dim_cap=args.dim_cap,
        svg=args.svg,
        scale=getattr(args, "scale", 1.0),
        suites=tuple(getattr(args, "suite", ())),
    )


def _print_status(message: str, is_error: bool = False):
    if not is_error:
        print(message, file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
    except SlackError as e:
        print(f"oneshot-qcap {args.command}: {e}", file=sys.stderr)
        return int(ExitCode.INPUT_ERROR)
    if config.grid < 1 or (config.dim_cap is not None and config.dim_cap < 1):
        print(f"oneshot-qcap {args.command}: --grid and --dim-cap must be positive", file=sys.stderr)
        return int(ExitCode.INPUT_ERROR)

    command = COMMANDS[CommandKind(config.command)](config)
    command.set_status_callback(_print_status)
    return command.run()


if __name__ == "__main__":
    sys.exit(main())
