#!/usr/bin/env python3
"""
qproc batch CLI - walk tables, spectra, measures, integrals and checks
from a JSON experiment config
"""

import argparse
import logging
import sys
from typing import List, Optional

from .commands import COMMANDS, CommandHandler, CommandOptions
from .config import load_experiment_config
from .output import render
from .. import __version__
from ..exceptions import (
    BudgetExceededError,
    ConfigurationError,
    NonConvergenceError,
    NormalizationError,
    QProcError,
    UnitarityError,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_NOT_SUITABLE = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qproc",
        description="Discrete quantum process simulator",
    )
    parser.add_argument("command", choices=COMMANDS, help="Computation to run")
    parser.add_argument("--config", required=True, help="JSON experiment config")
    parser.add_argument("--json", action="store_true", help="Emit JSON instead of CSV")
    parser.add_argument("--t-max", type=int, default=None, help="Override the deepest rank")
    parser.add_argument("--tol", type=float, default=None, help="Override the command tolerance")
    parser.add_argument("--seed", type=int, default=None, help="Seed for sampled checks")
    parser.add_argument("--dense-check", action="store_true", help="Cross-check spectra densely")
    parser.add_argument("--require-suitable", action="store_true",
                        help="Exit 4 unless every sweep is suitable")
    parser.add_argument("--output", default=None, help="Write to this file instead of stdout")
    parser.add_argument("--log-level", default=None, help="Logging level (default from settings)")
    parser.add_argument("--version", action="version", version=f"qproc {__version__}")
    return parser


def configure_logging(level: str) -> None:
    """Root logger on stderr so stdout stays byte-stable"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def run(args: argparse.Namespace) -> int:
    """Load the config, run the command and write its output"""
    config = load_experiment_config(args.config)
    configure_logging(args.log_level or config.settings.log_level)

    options = CommandOptions(t_max=args.t_max, tol=args.tol, seed=args.seed, dense_check=args.dense_check)
    result = CommandHandler(config, options).handle_command(args.command)

    if args.output:
        with open(args.output, 'w', newline='') as f:
            render(result, f, as_json=args.json)
    else:
        render(result, sys.stdout, as_json=args.json)

    if args.require_suitable:
        failing = [r for r in result.reports if not r.suitable]
        if failing:
            raise NonConvergenceError(
                f"{len(failing)} sweep(s) not suitable: " + ", ".join(f"{r.family} ({r.verdict.value})" for r in failing),
                verdict=failing[0].verdict.value,
            )
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        configure_logging(args.log_level)

    try:
        return run(args)
    except (ConfigurationError, UnitarityError, NormalizationError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except BudgetExceededError as e:
        logger.error(f"Budget exceeded (m={e.m}, n={e.n}, cap={e.cap}): {e}")
        return EXIT_BUDGET
    except NonConvergenceError as e:
        logger.error(str(e))
        return EXIT_NOT_SUITABLE
    except QProcError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
