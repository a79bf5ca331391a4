"""
Solver registry and the automatic pipeline.
"""
import logging
from typing import Callable, Dict, List, Optional

import numpy as np

from .classical import (
    SolverConfig,
    SolverReport,
    SolverStatus,
    certify,
    depth_solve,
    newton_solve,
    order_solve,
    residual_norm,
    thicknesses_solve,
)
from .errors import NoConvergenceError, QveInputError
from .perron import perron_newton_solve, perron_solve
from .problem import QveProblem, VariantKind
from .structure import classify, reduce_and_solve

logger = logging.getLogger(__name__)

Solver = Callable[[QveProblem, Optional[SolverConfig]], SolverReport]


def auto_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """
    Classify, split along the block structure of R when it is reducible, and
    solve each irreducible piece: Perron-Newton when a + b(e, e) = e on the
    piece, Newton on the substochastic head pieces.

    Raises:
        NoConvergenceError: a piece did not converge
        StructureError: a head block cannot be formed
    """
    cfg = cfg or SolverConfig()
    structure = classify(p)
    logger.debug(
        f"auto: rho(R)={structure.rho_R:.12g} ({structure.criticality.value}), "
        f"{len(structure.components)} component(s)"
    )
    pieces: List[SolverReport] = []

    def solve_piece(piece: QveProblem) -> np.ndarray:
        report = perron_newton_solve(piece, cfg) if piece.stochastic else newton_solve(piece, cfg)
        if not report.converged:
            raise NoConvergenceError(
                f"{report.solver} on a piece of size {piece.n} ended with status {report.status.value}"
            )
        pieces.append(report)
        return report.solution

    solution = reduce_and_solve(p, solve_piece)
    return SolverReport(
        solver='auto',
        variant=VariantKind(cfg.variant).value,
        solution=solution,
        iterations=sum(report.iterations for report in pieces),
        residual_history=[residual_norm(p, solution)],
        status=SolverStatus.CONVERGED,
        minimality=certify(p, solution),
        eigenvalue_history=[value for report in pieces for value in report.eigenvalue_history],
    )


SOLVERS: Dict[str, Solver] = {
    'depth': depth_solve,
    'order': order_solve,
    'thicknesses': thicknesses_solve,
    'newton': newton_solve,
    'perron': perron_solve,
    'perron-newton': perron_newton_solve,
    'auto': auto_solve,
}


def get_solver(name: str) -> Solver:
    try:
        return SOLVERS[name]
    except KeyError:
        raise QveInputError(f"Unknown solver {name!r}; choose from {', '.join(SOLVERS)}") from None


def solve(name: str, p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    report = get_solver(name)(p, cfg)
    logger.debug(f"{name}: {report.status.value} in {report.iterations} steps, residual {report.residual:.3e}")
    return report
