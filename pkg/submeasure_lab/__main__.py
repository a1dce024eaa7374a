"""Submeasure lab command line."""
import argparse
import logging
import os
import sys

from pydantic import ValidationError

from submeasure_lab import const
from submeasure_lab.cli import Command, RunConfig, run


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Covering numbers, submeasure classification and concentration experiments."
    )
    parser.add_argument("command", choices=[str(c) for c in Command], help="subcommand to run")
    parser.add_argument("--input", type=str, help="input JSON document", default=None)
    parser.add_argument(
        "--out",
        type=str,
        help="directory for reports",
        default=os.getenv(const.OUTPUT_ENV_VAR, const.DEFAULT_OUTPUT_DIR),
    )
    parser.add_argument("--seed", type=int, help="64-bit seed", default=None)
    parser.add_argument("--format", choices=["csv", "json"], default="json", help="table format")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials or samples", default=None)
    parser.add_argument("--xi-grid", nargs="+", help="decreasing xi values (p/q)", default=None)
    parser.add_argument("--epsilon", nargs="+", help="epsilon values (p/q)", default=None)
    parser.add_argument("--depth", type=int, help="truncation depth", default=2)
    parser.add_argument(
        "--max-atoms", type=int, help="atom cap", default=const.DEFAULT_MAX_ATOMS
    )
    parser.add_argument(
        "--sweep-limit", type=int, help="subset sweep cap", default=const.SUBSET_SWEEP_LIMIT
    )
    parser.add_argument(
        "--trial-cap", type=int, help="Monte Carlo trial cap", default=const.DEFAULT_TRIAL_CAP
    )
    parser.add_argument("--mode", choices=["bound", "explore"], default=None)
    parser.add_argument("--name", type=str, help="report name stem", default=None)
    parser.add_argument(
        "--verbose", action="store_true", help="Enable more verbose logging"
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, set up logging and run."""
    logger = logging.getLogger()
    logformat = logging.Formatter("%(asctime)-15s %(levelname)-5s %(name)s -- %(message)s")
    consolehandler = logging.StreamHandler()
    consolehandler.setFormatter(logformat)
    if not logger.handlers:
        logger.addHandler(consolehandler)
    logger.setLevel(logging.INFO)

    try:
        args = _parser().parse_args(argv)
    except SystemExit as err:
        return const.EXIT_VALIDATION if err.code else const.EXIT_OK
    if args.verbose or os.getenv(const.VERBOSE_ENV_VAR, "").strip() == "true":
        logger.setLevel(logging.DEBUG)

    try:
        config = RunConfig(
            command=args.command,
            input=args.input,
            out=args.out,
            seed=args.seed,
            format=args.format,
            trials=args.trials,
            xi_grid=args.xi_grid,
            epsilon=args.epsilon,
            depth=args.depth,
            max_atoms=args.max_atoms,
            sweep_limit=args.sweep_limit,
            trial_cap=args.trial_cap,
            mode=args.mode,
            name=args.name,
        )
    except ValidationError as err:
        logger.error("Invalid arguments: %s", err)
        return const.EXIT_VALIDATION
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
