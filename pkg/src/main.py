"""
Main entry point for the mapping scheduler.
Parses the command line, dispatches to a command and maps errors to exit codes.
"""

import argparse
import sys
from typing import List, Optional

from pydantic import ValidationError

from src.cli.commands import (
    EXIT_CONFIG,
    EXIT_SPACE,
    cmd_distribution,
    cmd_schedule,
    cmd_study,
    cmd_sweep,
    cmd_validate,
)
from src.utils.errors import (
    BudgetExceeded,
    ConfigError,
    InfeasibleLowestLevel,
    NonDivisibleUnrolling,
    SpaceTooLarge,
)
from src.utils.logger import get_logger, setup_logger

logger = get_logger(__name__)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_search_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--arch", required=True, help="Architecture config file")
    parser.add_argument("--spatial", help="Spatial unrolling config file (default: none)")
    parser.add_argument("--engine", choices=["auto", "sa", "exhaustive"], default="auto")
    parser.add_argument("--mode", choices=["even", "uneven"], default="uneven")
    parser.add_argument("--seed", type=int, help="Random seed")
    parser.add_argument("--iterations", type=_positive_int, help="Annealing iterations I")
    parser.add_argument("--rho", type=float, help="Cooling factor")
    parser.add_argument("--t0", type=float, help="Initial temperature")
    parser.add_argument("--restarts", type=_positive_int, help="Independent annealing chains")
    parser.add_argument("--initial", choices=["random", "canonical"], help="Annealing start ordering")
    parser.add_argument("--lpf-limit", dest="lpf_limit", type=_positive_int, help="Coarsen orderings to N loops")
    parser.add_argument("--workers", type=_positive_int, help="Parallel worker processes")
    parser.add_argument("--out", help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mapsearch",
        description="Energy-optimal loop ordering and memory allocation for DNN layers",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    schedule = commands.add_parser("schedule", help="Schedule one layer")
    schedule.add_argument("--layer", required=True, help="Layer config file")
    _add_search_flags(schedule)
    schedule.set_defaults(handler=cmd_schedule)

    sweep = commands.add_parser("sweep", help="Schedule every unique layer of a network")
    sweep.add_argument("--network", required=True, help="Network config file")
    _add_search_flags(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    distribution = commands.add_parser("distribution", help="Export visited objectives of SA and random search")
    distribution.add_argument("--layer", required=True)
    distribution.add_argument("--arch", required=True)
    distribution.add_argument("--spatial")
    distribution.add_argument("--mode", choices=["even", "uneven"], default="uneven")
    distribution.add_argument("--samples", type=_positive_int, required=True)
    distribution.add_argument("--seed", type=int, required=True)
    distribution.add_argument("--rho", type=float)
    distribution.add_argument("--t0", type=float)
    distribution.add_argument("--lpf-limit", dest="lpf_limit", type=_positive_int)
    distribution.add_argument("--out", required=True)
    distribution.set_defaults(handler=cmd_distribution)

    validate = commands.add_parser("validate", help="Check the cost model against the loop-nest simulation")
    source = validate.add_mutually_exclusive_group()
    source.add_argument("--fixtures", help="Directory of fixture files (default: built-in set)")
    source.add_argument("--random", type=_positive_int, help="Number of randomized checks")
    validate.add_argument("--seed", type=int)
    validate.add_argument("--out")
    validate.set_defaults(handler=cmd_validate)

    study = commands.add_parser("study", help="Annealing optimality study against brute force")
    study.add_argument("--fixtures", help="Directory of fixture files (default: built-in study set)")
    study.add_argument("--runs", type=_positive_int, default=100)
    study.add_argument("--seed", type=int)
    study.add_argument("--iterations", type=_positive_int)
    study.add_argument("--rho", type=float)
    study.add_argument("--t0", type=float)
    study.add_argument("--out")
    study.set_defaults(handler=cmd_study)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Application entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        setup_logger()
        return args.handler(args)
    except (ConfigError, NonDivisibleUnrolling, InfeasibleLowestLevel, BudgetExceeded) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except ValidationError as e:
        logger.error(f"Invalid settings or parameters: {e}")
        return EXIT_CONFIG
    except SpaceTooLarge as e:
        logger.error(f"Search space too large: {e}")
        return EXIT_SPACE


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(130)
