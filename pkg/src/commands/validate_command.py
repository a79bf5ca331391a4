"""
Validate command handler for the MBT extinction solver.
Compares the automatic solver against Monte Carlo extinction estimates.
"""
import argparse
import logging
from typing import List

from ..models.classical import SolverConfig
from ..models.montecarlo import McConfig, estimate_all_states, within_band
from ..models.problem import VariantKind
from ..models.solvers import auto_solve
from ..utils.config import (
    EXIT_NO_CONVERGENCE,
    EXIT_OK,
    EXIT_VALIDATION_FAILED,
    MC_DEFAULT_MAX_POPULATION,
    MC_DEFAULT_TRIALS,
    MC_TRUNCATION_ALLOWANCE,
)
from .base import CommandHandler, add_problem_arguments, load_input

logger = logging.getLogger(__name__)


class ValidateCommand(CommandHandler):
    """Command handler for `validate`."""

    @property
    def command_name(self) -> str:
        return "validate"

    @property
    def aliases(self) -> List[str]:
        return ["mc"]

    @property
    def description(self) -> str:
        return "Check solver output against simulated extinction frequencies."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_problem_arguments(parser)
        parser.add_argument('--trials', type=int, default=MC_DEFAULT_TRIALS)
        parser.add_argument('--max-population', type=int, default=MC_DEFAULT_MAX_POPULATION)
        parser.add_argument('--seed', type=int, default=0)

    def handle(self, args: argparse.Namespace) -> int:
        problem, _ = load_input(args)
        mc = McConfig(trials=args.trials, max_population=args.max_population, seed=args.seed)
        if mc.trials == 1:
            logger.warning("A single trial gives a non-informative comparison")

        report = auto_solve(problem, SolverConfig(variant=VariantKind.SYMMETRIZE))
        if not report.converged:
            logger.error(f"auto solver did not converge ({report.status.value})")
            return EXIT_NO_CONVERGENCE

        estimates = estimate_all_states(problem, mc)
        lines = ["state,solution,estimate,stderr,result"]
        failures = 0
        for state, (solution, (estimate, stderr)) in enumerate(zip(report.solution, estimates)):
            ok = within_band(float(solution), estimate, stderr, mc.trials, MC_TRUNCATION_ALLOWANCE)
            failures += not ok
            lines.append(f"{state},{float(solution)!r},{estimate!r},{stderr!r},{'pass' if ok else 'FAIL'}")
        self.send_response('\n'.join(lines))

        if failures:
            logger.error(f"{failures} of {problem.n} states outside the 3-sigma band")
            return EXIT_VALIDATION_FAILED
        return EXIT_OK
