"""
Command-line entry point: ``python -m qmac_capacity <command> ...``

Exit codes: 0 success, 2 input validation, 3 resource cap, 4 property violation.
"""

import argparse
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional

from . import __version__
from .commands.base import BaseCommand
from .commands.eval_commands import QUANTITIES, EvalCommand
from .commands.files import BUILTIN_CHANNELS, builtin_channel, load_channel, load_state
from .commands.plot_commands import PlotCommand
from .commands.property_commands import PropertySuiteCommand
from .commands.region_commands import RegionCommand
from .errors import QmacError, ValidationError
from .quantum.channels import QuantumChannel
from .regions.optimizer import OptimizerConfig
from .settings import Settings, configure_logging, load_settings

logger = logging.getLogger(__name__)

COMMANDS: Dict[str, BaseCommand] = {
    "region": RegionCommand(),
    "props": PropertySuiteCommand(),
    "plot": PlotCommand(),
    "eval": EvalCommand(),
}


def _add_channel_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--channel", type=Path, help="channel spec JSON file")
    group.add_argument("--builtin", choices=BUILTIN_CHANNELS, help="built-in channel")
    parser.add_argument("--d", type=int, default=2, help="erasure dimension d")
    parser.add_argument("--p", type=float, default=0.1, help="phase-flip or dephasing probability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmac-capacity",
        description="Capacity regions of quantum multiple-access channels",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", type=Path, default=None, help="YAML configuration overrides")
    sub = parser.add_subparsers(dest="command", required=True)

    region = sub.add_parser("region", help=COMMANDS["region"].description)
    region.add_argument("kind", choices=("cq", "qq"))
    _add_channel_arguments(region)
    region.add_argument("--k", type=int, default=1, help="regularization level")
    region.add_argument("--restarts", type=int, default=None)
    region.add_argument("--max-iters", type=int, default=None)
    region.add_argument("--weights", type=int, default=None)
    region.add_argument("--ensemble-size", type=int, default=None)
    region.add_argument("--seed", type=int, default=None)
    region.add_argument("--out", type=Path, default=None, help="region JSON path (stdout when omitted)")

    props = sub.add_parser("props", help=COMMANDS["props"].description)
    props.add_argument("--trials", type=int, default=None)
    props.add_argument("--dims", type=int, nargs="+", default=None)
    props.add_argument("--seed", type=int, default=None)
    props.add_argument("--slack", type=float, default=None)
    props.add_argument("--checks", nargs="+", default=None, help="subset of check names")
    props.add_argument("--out", type=Path, default=Path("properties.json"))

    plot = sub.add_parser("plot", help=COMMANDS["plot"].description)
    plot.add_argument("region", type=Path, help="region JSON file")
    plot.add_argument("--oracle", default=None, help="erasure:<d> or phase_flip:<p>")
    plot.add_argument("--out", type=Path, required=True, help="SVG path")

    ev = sub.add_parser("eval", help=COMMANDS["eval"].description)
    ev.add_argument("quantity", choices=QUANTITIES)
    ev.add_argument("--state", type=Path, required=True, help="state JSON file")
    ev.add_argument("--other", type=Path, default=None, help="second state for distances")
    _add_channel_arguments(ev)
    ev.add_argument("--source", nargs="+", default=None, help="first subsystem labels")
    ev.add_argument("--target", nargs="+", default=None, help="second subsystem labels")
    return parser


def resolve_channel(args: argparse.Namespace, settings: Settings) -> Optional[QuantumChannel]:
    if args.channel is not None:
        return load_channel(args.channel, float(settings.numerics.get("kraus_tol", 1e-9)))
    if args.builtin is not None:
        params = {"d": args.d} if args.builtin == "erasure" else {"p": args.p}
        return builtin_channel(args.builtin, params)
    return None


def _dispatch(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    float_format = settings.output.get("float_format", "%.12f")
    if args.command == "region":
        channel = resolve_channel(args, settings)
        if channel is None:
            raise ValidationError("region needs --channel or --builtin")
        config = OptimizerConfig.from_settings(
            settings, restarts=args.restarts, max_iters=args.max_iters, weights=args.weights,
            ensemble_size=args.ensemble_size, seed=args.seed,
        )
        return COMMANDS["region"].run(kind=args.kind, channel=channel, out=args.out, k=args.k,
                                      config=config, float_format=float_format)
    if args.command == "props":
        suite = settings.property_suite
        return COMMANDS["props"].run(
            out=args.out,
            trials=args.trials if args.trials is not None else int(suite.get("trials", 1000)),
            dims=args.dims or list(suite.get("dims", [2, 3, 4])),
            seed=args.seed if args.seed is not None else int(suite.get("seed", 42)),
            slack=args.slack if args.slack is not None else float(suite.get("slack", 1e-8)),
            checks=args.checks,
        )
    if args.command == "plot":
        return COMMANDS["plot"].run(region_path=args.region, out=args.out, oracle=args.oracle,
                                    hashsalt=settings.output.get("svg_hashsalt", "qmac-capacity"))
    state = load_state(args.state)
    other = load_state(args.other) if args.other else None
    return COMMANDS["eval"].run(quantity=args.quantity, state=state, other=other,
                                channel=resolve_channel(args, settings), source=args.source,
                                target=args.target, float_format=float_format)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.config)
        configure_logging(settings)
        result = _dispatch(args, settings)
    except QmacError as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    if not result.get("success") and "error" in result:
        print(f"error: {result['error']}", file=sys.stderr)
    elif args.command == "eval":
        print(result["text"])
    elif "document" in result:
        print(result["document"], end="")
    else:
        for key in ("region", "frontier_csv", "report", "svg", "manifest"):
            if key in result:
                print(f"{key}: {result[key]}")
    return int(result["exit_code"])


if __name__ == "__main__":
    sys.exit(main())
