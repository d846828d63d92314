from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

from app.commands import COMMANDS
from app.config import settings
from app.reports import FORMATS, render
from app.run_config import FAMILY_PARAMS, RunConfig, parse_alphas
from services.spectral_types import DomainError, GraphFamily, RdSpreadError

logging.basicConfig(
    level=getattr(logging, settings.log_level.upper(), logging.INFO),
    format="%(asctime)s %(levelname)s %(name)s %(message)s",
)
logger = logging.getLogger(__name__)

EXIT_INPUT_ERROR = 2


def _family(value: str) -> GraphFamily:
    try:
        return GraphFamily(value)
    except ValueError as exc:
        choices = ", ".join(family.value for family in GraphFamily)
        raise argparse.ArgumentTypeError(
            f"unknown family {value!r} (choose from {choices})"
        ) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_argument_group("input")
    source.add_argument("--graph6", help="inline graph6 string")
    source.add_argument("--edgelist", type=Path, help="file of 'u v' lines, 0-based")
    source.add_argument("--family", type=_family, help="generated family name")
    source.add_argument("--n", type=int, help="order (complete/path/cycle/random) or edge-list n")
    source.add_argument("--a", type=int, help="first part size of K_{a,b}")
    source.add_argument("--b", type=int, help="second part size of K_{a,b}")
    source.add_argument("--m", type=int, help="leaves on u for double_star")
    source.add_argument("--p", type=float, help="edge probability for random_connected")
    source.add_argument("--seed", type=int, default=0, help="seed for random_connected")

    run = common.add_argument_group("run")
    run.add_argument("--alpha", type=float, help="single alpha in [0, 1]")
    run.add_argument("--alphas", help="grid start:stop:step (stop excluded) or comma list")
    run.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    run.add_argument("--tol", type=float, help="override bound, equality and oracle tolerances")
    run.add_argument("--max-order", type=int, help="largest order checked by verify-family")
    run.add_argument("--workers", type=int, default=settings.sweep_workers, help="sweep threads")

    parser = argparse.ArgumentParser(
        prog="rd-spread",
        description="Spectra, spreads and bounds of generalized reciprocal distance matrices.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("spectrum", parents=[common], help="eigenvalues and invariants")
    commands.add_parser("bounds", parents=[common], help="evaluate every applicable bound")
    commands.add_parser("sweep", parents=[common], help="bounds over an alpha grid (CSV rows)")
    commands.add_parser("verify-family", parents=[common], help="closed forms vs eigensolver")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.alpha is not None and args.alphas is not None:
        raise DomainError("pass either --alpha or --alphas, not both")
    if args.alphas is not None:
        alphas: tuple[float, ...] | None = parse_alphas(args.alphas)
    elif args.alpha is not None:
        alphas = (args.alpha,)
    else:
        alphas = None
    if args.command == "sweep" and not alphas:
        raise DomainError("sweep needs a non-empty alpha grid (--alphas start:stop:step)")
    if args.tol is not None and not (math.isfinite(args.tol) and args.tol > 0):
        raise DomainError(f"--tol must be a finite positive number, got {args.tol}")
    return RunConfig(
        command=args.command,
        graph6=args.graph6,
        edgelist=args.edgelist,
        family=args.family,
        params={name: getattr(args, name) for name in FAMILY_PARAMS},
        alphas=alphas,
        fmt=args.fmt,
        tol=args.tol,
        max_order=args.max_order,
        workers=args.workers,
    )


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        result = COMMANDS[config.command](config)
    except (RdSpreadError, OSError) as exc:
        logger.debug("command %s failed", args.command, exc_info=True)
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    sys.stdout.write(render(result, config.fmt, digits=settings.output_digits))
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
