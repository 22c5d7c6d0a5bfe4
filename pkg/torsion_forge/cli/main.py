"""
CLI Main Module - Entry point of the `torsion-forge` command.

This module builds the argument parser, loads the configuration, sets up
logging, dispatches to a command and writes its report.

Key components:
- `build_parser`: The parser with its four subcommands and the shared options.
- `main`: Runs one command and returns the process exit code.

Integration:
- Installed as the `torsion-forge` console script and run by `python -m torsion_forge`.
- Exit codes: 0 success, 2 input error, 3 verification failure, 4 solver failure.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from torsion_forge.cli.commands import assemble, block, gram, verify
from torsion_forge.cli.report import dumps_canonical, render_text
from torsion_forge.core.config import init_config
from torsion_forge.core.errors import InvalidShapeError, TorsionForgeError
from torsion_forge.core.logging_config import setup_logging

logger = logging.getLogger(__name__)

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text", help="Report format")
    common.add_argument("--tol", type=float, default=None,
                        help="Comparison tolerance (overrides TORSION_FORGE_TOL and the config file)")
    common.add_argument("--seed", type=int, default=None, help="Master seed for every random choice")
    common.add_argument("--samples", type=int, default=None, help="Samples per sweep")
    common.add_argument("--output", default=None, help="Write the report to this file instead of stdout")
    common.add_argument("--config", default=None, help="Path to a config YAML file")
    common.add_argument("--log-level", default=None,
                        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"))
    return common

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torsion-forge",
        description="Twisted Reidemeister torsion of fundamental shadow link complements and of doubles of polyhedra.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [_common_options()]
    for command in (gram, block, assemble, verify):
        command.register(subparsers, parents)
    return parser

def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)

def _report_error(e: TorsionForgeError) -> None:
    print(f"error: {e}", file=sys.stderr)
    if isinstance(e, InvalidShapeError):
        for line in e.diagnostics:
            print(f"  {line}", file=sys.stderr)

def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    try:
        config = init_config(args.config, args.tol)
    except TorsionForgeError as e:
        _report_error(e)
        return e.exit_code
    setup_logging(level=args.log_level or config.logging.level, format_type=config.logging.format)
    if args.seed is None:
        args.seed = config.sampling.seed
    logger.debug(f"Command {args.command} with tolerance {config.numerics.tolerance:g}, seed {args.seed}")

    try:
        report, code = args.handler(args)
    except TorsionForgeError as e:
        logger.debug(f"{args.command} failed", exc_info=True)
        _report_error(e)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {e}", exc_info=True)
        return 1

    report.setdefault("seed", args.seed)
    text = dumps_canonical(report) if args.format == "json" else render_text(report)
    if args.output:
        Path(args.output).write_text(text)
        logger.info(f"Report written to {args.output}")
    else:
        sys.stdout.write(text)
    return code

if __name__ == "__main__":
    sys.exit(main())
