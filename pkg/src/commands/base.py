"""
Command handler base module for the MBT extinction solver.
Provides the base class for command handlers and the shared problem options.
"""
import argparse
import logging
import sys
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

from ..models.errors import QveInputError
from ..models.instances import GeneratorSpec, generate
from ..models.problem import QveProblem
from ..models.storage import load_problem

logger = logging.getLogger(__name__)


class CommandHandler(ABC):
    """Base class for command handlers."""

    @property
    @abstractmethod
    def command_name(self) -> str:
        """Return the name of the command."""
        pass

    @property
    def aliases(self) -> List[str]:
        """Return a list of command aliases."""
        return []

    @property
    def description(self) -> str:
        """Return a description of the command."""
        return "No description provided."

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Declare the command's options on its subparser."""
        pass

    @abstractmethod
    def handle(self, args: argparse.Namespace) -> int:
        """
        Handle the command.

        Args:
            args: Parsed command-line arguments

        Returns:
            The process exit code
        """
        pass

    def send_response(self, content: str) -> None:
        """Write a result to standard output; diagnostics go through logging."""
        sys.stdout.write(content if content.endswith('\n') else content + '\n')


def add_problem_arguments(parser: argparse.ArgumentParser) -> None:
    """--input / --generate and --renormalize, shared by every problem-taking command."""
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', metavar='FILE', help="problem file (JSON)")
    source.add_argument('--generate', metavar='FAMILY,N,LAMBDA,SEED',
                        help="generated instance, e.g. random_mbt,20,3.5,0")
    parser.add_argument('--renormalize', action='store_true',
                        help="rescale an input file so that a + b(e,e) = e")


def load_input(args: argparse.Namespace) -> Tuple[QveProblem, Dict[str, Any]]:
    """The problem named by --input or --generate, with metadata for reports."""
    if args.input:
        return load_problem(args.input, renormalize=args.renormalize), {'input': args.input}
    spec = GeneratorSpec.parse(args.generate)
    if args.renormalize:
        logger.info("--renormalize has no effect on generated instances")
    return generate(spec), {'generator': spec.describe()}


def parse_list(text: Optional[str], cast=str) -> List:
    """Comma-separated option values; an empty string gives an empty list."""
    if text is None:
        return []
    try:
        return [cast(item.strip()) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise QveInputError(f"Bad list value in {text!r}: {e}") from e
