"""
Command-line front end.

``dicke-metrology <command> [--config FILE] [--out DIR] [--workers N] [--engine E]``
runs one of the registered commands and writes ``<out>/<command>.csv``. Exit status is 0
on success, 1 for a physics or validation error and 2 for an I/O error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import logging
import sys
from collections.abc import Sequence
from typing import Optional

from .._common import SimulationError
from ..protocol import Engine
from ._commands import COMMANDS, CommandContext, run_command
from ._config import RunConfig, load_config, parse_config

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_ENGINES = {
    "full": (Engine.FULL,),
    "demkov": (Engine.DEMKOV,),
    "both": (Engine.FULL, Engine.DEMKOV),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-metrology",
        description="Spectra, dynamics and metrology with the Dicke model.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, cmd in COMMANDS.items():
        sub = subparsers.add_parser(name, help=cmd.help)
        sub.add_argument("--config", help="JSON configuration file")
        sub.add_argument("--out", help="output directory (overrides the config)")
        sub.add_argument("--workers", type=int, help="worker processes for grids")
        sub.add_argument(
            "--engine",
            choices=sorted(_ENGINES),
            default="both",
            help="protocol engine(s) for protocol and sweep",
        )
        sub.add_argument(
            "--seed",
            type=int,
            help="reserved; every path is deterministic",
        )
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true")
        verbosity.add_argument("-q", "--quiet", action="store_true")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)
    logging.captureWarnings(True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        config: RunConfig = load_config(args.config)
        engine_override = args.engine if args.engine in ("full", "demkov") else None
        config = config.with_overrides(
            out=args.out, workers=args.workers, engine=engine_override
        )
        executor: Optional[concurrent.futures.Executor] = None
        if config.workers > 1:
            executor = concurrent.futures.ProcessPoolExecutor(max_workers=config.workers)
        try:
            path = run_command(
                args.command,
                config,
                CommandContext(engines=_ENGINES[args.engine], executor=executor),
            )
        finally:
            if executor is not None:
                executor.shutdown()
    except SimulationError as err:
        logger.error("%s: %s", err.type.value, err)
        return err.exit_code
    logger.info("wrote %s", path)
    return 0


__all__ = ["build_parser", "load_config", "main", "parse_config", "RunConfig"]

if __name__ == "__main__":
    sys.exit(main())
