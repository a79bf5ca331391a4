"""
Analyze command handler for the MBT extinction solver.
Prints criticality and block structure, and optionally a minimality verdict.
"""
import argparse
import logging
from typing import List

from ..models.errors import QveInputError
from ..models.storage import load_report
from ..models.structure import certify_minimal, classify
from ..utils.config import EXIT_OK
from .base import CommandHandler, add_problem_arguments, load_input

logger = logging.getLogger(__name__)


class AnalyzeCommand(CommandHandler):
    """Command handler for `analyze`."""

    @property
    def command_name(self) -> str:
        return "analyze"

    @property
    def aliases(self) -> List[str]:
        return ["structure"]

    @property
    def description(self) -> str:
        return "Report rho(R), criticality and the strongly connected blocks of R."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_problem_arguments(parser)
        parser.add_argument('--solution', metavar='FILE', help="solver report whose solution gets certified")

    def handle(self, args: argparse.Namespace) -> int:
        problem, _ = load_input(args)
        structure = classify(problem)
        shape = 'irreducible' if structure.irreducible else 'reducible'

        lines = [
            f"{structure.criticality.value}, rho={structure.rho_R:.12g}, {shape}",
            f"components: {len(structure.components)}",
        ]
        for block, radius in zip(structure.components, structure.block_radii):
            lines.append(f"  {block} rho={radius:.12g}")

        if args.solution:
            solution = load_report(args.solution).solution
            if any(value is None for value in solution):
                raise QveInputError(f"{args.solution} holds a solution with non-finite entries")
            verdict = certify_minimal(problem, solution)
            lines.append(f"minimality: {verdict.classification.value}")

        self.send_response('\n'.join(lines))
        return EXIT_OK
