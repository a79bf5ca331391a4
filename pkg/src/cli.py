"""
Main command-line module for the MBT extinction solver.
Registers the command handlers and maps failures to exit codes.
"""
import argparse
import logging
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from src.commands.analyze_command import AnalyzeCommand
from src.commands.base import CommandHandler
from src.commands.bench_command import BenchCommand
from src.commands.generate_command import GenerateCommand
from src.commands.solve_command import SolveCommand
from src.commands.validate_command import ValidateCommand
from src.models.errors import (
    NoConvergenceError,
    NumericError,
    QveInputError,
    ReducibleInputError,
    StructureError,
)
from src.utils.config import EXIT_INPUT_ERROR, EXIT_NO_CONVERGENCE
from src.utils.logging_utils import setup_logger

logger = logging.getLogger(__name__)


def load_commands() -> Dict[str, CommandHandler]:
    """Instantiate every command handler, keyed by name and alias."""
    handlers = [
        SolveCommand(),
        BenchCommand(),
        ValidateCommand(),
        AnalyzeCommand(),
        GenerateCommand(),
    ]
    command_handlers = {}
    for handler in handlers:
        command_handlers[handler.command_name] = handler
        for alias in handler.aliases:
            command_handlers[alias] = handler
        logger.debug(f"Registered command: {handler.command_name}")
    return command_handlers


def build_parser(command_handlers: Dict[str, CommandHandler]) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='qve',
        description="Minimal nonnegative solutions of x = a + b(x, x) (extinction probabilities of MBTs).",
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    seen = set()
    for handler in command_handlers.values():
        if handler.command_name in seen:
            continue
        seen.add(handler.command_name)
        sub = subparsers.add_parser(handler.command_name, aliases=handler.aliases, help=handler.description)
        handler.add_arguments(sub)
        sub.set_defaults(handler=handler)
    return parser


def _fail(code: int, message: str, error: Exception) -> int:
    logger.debug(message, exc_info=error)
    sys.stderr.write(f"error: {message}\n")
    return code


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the exit code."""
    setup_logger()
    parser = build_parser(load_commands())
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on bad usage; usage errors are input errors here
        return EXIT_INPUT_ERROR if e.code else 0

    try:
        return args.handler.handle(args)
    except ValidationError as e:
        return _fail(EXIT_INPUT_ERROR, f"invalid option: {e.errors()[0]['msg']}", e)
    except QveInputError as e:
        return _fail(EXIT_INPUT_ERROR, str(e), e)
    except ReducibleInputError as e:
        return _fail(EXIT_INPUT_ERROR, f"{e} (use --solver auto to reduce it)", e)
    except (StructureError, NoConvergenceError, NumericError) as e:
        return _fail(EXIT_NO_CONVERGENCE, f"{type(e).__name__}: {e}", e)
    except Exception as e:
        logger.error(f"Error handling command {args.command}: {str(e)}", exc_info=True)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
