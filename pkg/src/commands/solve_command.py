"""
Solve command handler for the MBT extinction solver.
Runs one solver on a problem and writes the solution report.
"""
import argparse
import json
import logging
from typing import List

from ..models.classical import SolverConfig
from ..models.problem import VariantKind
from ..models.solvers import solve
from ..models.storage import report_to_document, save_report
from ..utils.config import EXIT_NO_CONVERGENCE, EXIT_OK, SOLVER_NAMES, VARIANT_NAMES
from .base import CommandHandler, add_problem_arguments, load_input

logger = logging.getLogger(__name__)


class SolveCommand(CommandHandler):
    """Command handler for `solve`."""

    @property
    def command_name(self) -> str:
        return "solve"

    @property
    def aliases(self) -> List[str]:
        return ["run"]

    @property
    def description(self) -> str:
        return "Compute the minimal nonnegative solution of x = a + b(x, x)."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        add_problem_arguments(parser)
        parser.add_argument('--solver', choices=SOLVER_NAMES, default='auto')
        parser.add_argument('--variant', choices=VARIANT_NAMES, default=None,
                            help="bilinear form to iterate with (auto defaults to symmetrize)")
        parser.add_argument('--tol', type=float, default=None)
        parser.add_argument('--max-iters', type=int, default=None)
        parser.add_argument('--output', metavar='FILE', help="report file; printed to stdout when omitted")

    def handle(self, args: argparse.Namespace) -> int:
        problem, meta = load_input(args)
        variant = args.variant or ('symmetrize' if args.solver == 'auto' else 'original')

        options = {'variant': VariantKind(variant)}
        if args.tol is not None:
            options['tol'] = args.tol
        if args.max_iters is not None:
            options['max_iters'] = args.max_iters
        cfg = SolverConfig(**options)

        logger.info(f"Solving n={problem.n} with {args.solver} ({variant})")
        report = solve(args.solver, problem, cfg)
        logger.info(
            f"{args.solver}: {report.status.value} after {report.iterations} steps, "
            f"residual {report.residual:.3e}"
        )

        if args.output:
            save_report(args.output, report, meta)
            minimality = report.minimality.classification.value if report.minimality else 'unknown'
            self.send_response(
                f"status={report.status.value} iterations={report.iterations} "
                f"residual={report.residual!r} minimality={minimality}"
            )
        else:
            self.send_response(json.dumps(report_to_document(report, meta).model_dump(), indent=2, allow_nan=False))

        return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE
