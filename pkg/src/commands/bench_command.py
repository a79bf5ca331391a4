"""
Bench command handler for the MBT extinction solver.
Sweeps solvers and variants over fractions of the critical lambda and prints CSV.
"""
import argparse
import io
import logging
from typing import List

from ..models.bench import BenchGrid, run_grid, write_rows
from ..models.errors import QveInputError
from ..utils.config import EXIT_OK, FAMILY_NAMES
from .base import CommandHandler, parse_list

logger = logging.getLogger(__name__)


class BenchCommand(CommandHandler):
    """Command handler for `bench`."""

    @property
    def command_name(self) -> str:
        return "bench"

    @property
    def aliases(self) -> List[str]:
        return ["benchmark"]

    @property
    def description(self) -> str:
        return "Benchmark solvers on random MBTs near criticality; CSV on stdout."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument('--family', choices=FAMILY_NAMES, default='random_mbt')
        parser.add_argument('--n', type=int, default=20)
        parser.add_argument('--seeds', default='0', help="comma-separated seeds")
        parser.add_argument('--lambda-grid', default='0.5,0.9,0.99,0.999',
                            help="fractions of the critical lambda")
        parser.add_argument('--solvers', default='newton,perron,perron-newton')
        parser.add_argument('--variants', default='original')
        parser.add_argument('--tol', type=float, default=None)
        parser.add_argument('--max-iters', type=int, default=None)
        parser.add_argument('--jobs', type=int, default=1, help="worker processes")
        parser.add_argument('--omit-timing', action='store_true',
                            help="write wall_time as 0.0 for reproducible output")

    def handle(self, args: argparse.Namespace) -> int:
        solvers = parse_list(args.solvers)
        if not solvers:
            raise QveInputError("bench needs at least one solver")
        if args.jobs < 1:
            raise QveInputError(f"--jobs must be positive, got {args.jobs}")

        grid = BenchGrid(
            family=args.family,
            n=args.n,
            seeds=parse_list(args.seeds, int),
            lambda_fracs=parse_list(args.lambda_grid, float),
            solvers=solvers,
            variants=parse_list(args.variants),
            tol=args.tol,
            max_iters=args.max_iters,
            omit_timing=args.omit_timing,
        )
        rows = run_grid(grid, jobs=args.jobs)

        buffer = io.StringIO()
        write_rows(rows, buffer)
        self.send_response(buffer.getvalue())
        failed = sum(1 for row in rows if row.status != 'converged')
        logger.info(f"Bench finished: {len(rows)} rows, {failed} not converged")
        return EXIT_OK
