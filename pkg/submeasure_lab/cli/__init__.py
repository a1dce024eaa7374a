"""Command-line front end."""
import json
import logging

from pydantic import ValidationError

from submeasure_lab import const
from submeasure_lab.cli.commands import HANDLERS, Context
from submeasure_lab.cli.config import OutputStore
from submeasure_lab.cli.models import Command, ReportEnvelope, RunConfig
from submeasure_lab.exceptions import InvalidInputError, LimitExceededError

LOGGER = logging.getLogger(__name__)

__all__ = ["Command", "ReportEnvelope", "RunConfig", "run"]


def run(config: RunConfig) -> int:
    """Dispatch one subcommand, write its report and return the exit code."""
    store = OutputStore(config.out)
    name = OutputStore.report_name(str(config.command), config.input, config.name)
    ctx = Context(config, store, name)
    LOGGER.info("Running %s", config.command)
    try:
        output = HANDLERS[config.command](ctx)
    except json.JSONDecodeError as err:
        LOGGER.error("Malformed JSON in %s: line %d column %d: %s", config.input, err.lineno, err.colno, err.msg)
        return const.EXIT_VALIDATION
    except (ValidationError, InvalidInputError) as err:
        LOGGER.error("Invalid input: %s", err)
        return const.EXIT_VALIDATION
    except LimitExceededError as err:
        LOGGER.error("Limit exceeded: %s", err)
        return const.EXIT_LIMIT
    for warning in output.warnings:
        LOGGER.warning(warning)
    envelope = ReportEnvelope(
        command=config.command,
        version=const.VERSION,
        seed=output.seed,
        input=str(config.input) if config.input is not None else None,
        result=output.result,
        warnings=output.warnings,
    )
    store.write_report(name, envelope)
    return const.EXIT_OK
