"""
Classical iterations for the minimal solution of x = a + b(x, x):
depth, order, thicknesses and Newton's method, all started from x = 0.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..utils.config import DEFAULT_TOL, LINEAR_MAX_ITERS, NEWTON_MAX_ITERS
from .errors import NumericError, SingularSystemError
from .linalg import MmatrixVerdict, linear_solve
from .problem import (
    QveProblem,
    VariantKind,
    eval_bilinear,
    jacobian,
    left_matrix,
    residual,
    right_matrix,
)
from .structure import Criticality, StructureReport, classify, jacobian_verdict

logger = logging.getLogger(__name__)


class SolverConfig(BaseModel):
    """Stopping rule and bilinear-form choice shared by every solver."""
    model_config = ConfigDict(frozen=True)

    tol: float = Field(DEFAULT_TOL, gt=0)
    max_iters: Optional[int] = Field(None, ge=1)
    variant: VariantKind = VariantKind.ORIGINAL
    record_iterates: bool = False
    detect_critical: bool = True

    def iteration_limit(self, default: int) -> int:
        return self.max_iters if self.max_iters is not None else default


class SolverStatus(str, Enum):
    CONVERGED = 'converged'
    MAX_ITERS = 'max_iters'
    NUMERIC_FAILURE = 'numeric_failure'


@dataclass
class SolverReport:
    """Outcome of one solver run."""
    solver: str
    variant: str
    solution: np.ndarray
    iterations: int
    residual_history: List[float]
    status: SolverStatus
    minimality: Optional[MmatrixVerdict] = None
    eigenvalue_history: List[float] = field(default_factory=list)
    iterates: List[np.ndarray] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status is SolverStatus.CONVERGED

    @property
    def residual(self) -> float:
        return self.residual_history[-1] if self.residual_history else float('inf')


def residual_norm(p: QveProblem, x) -> float:
    return float(np.max(np.abs(residual(p, x))))


def certify(p: QveProblem, x: np.ndarray) -> Optional[MmatrixVerdict]:
    """M-matrix verdict on F'_x; None when the eigensolver gives up."""
    try:
        return jacobian_verdict(p, x)
    except NumericError as e:
        logger.warning(f"Minimality check failed: {e}")
        return None


def critical_shortcut(p: QveProblem, cfg: SolverConfig, solver: str,
                      criticalities=(Criticality.CRITICAL,),
                      structure: Optional[StructureReport] = None) -> Optional[SolverReport]:
    """
    Report x = e without iterating when the problem's criticality is in
    `criticalities`; the minimal solution is e whenever rho(R) <= 1.
    """
    if not cfg.detect_critical or not p.stochastic:
        return None
    structure = structure or classify(p)
    if structure.criticality not in criticalities:
        return None
    logger.debug(f"{solver}: rho(R)={structure.rho_R:.12g} is {structure.criticality.value}; minimal solution is e")
    ones = np.ones(p.n)
    return SolverReport(
        solver=solver,
        variant=VariantKind(cfg.variant).value,
        solution=ones,
        iterations=0,
        residual_history=[residual_norm(p, ones)],
        status=SolverStatus.CONVERGED,
        minimality=certify(p, ones),
        iterates=[ones.copy()] if cfg.record_iterates else [],
    )


Step = Callable[[QveProblem, np.ndarray, int], np.ndarray]


def _run_classical(p: QveProblem, cfg: SolverConfig, solver: str, step: Step, default_max_iters: int) -> SolverReport:
    shortcut = critical_shortcut(p, cfg, solver)
    if shortcut is not None:
        return shortcut

    problem = p.with_variant(cfg.variant)
    limit = cfg.iteration_limit(default_max_iters)
    x = np.zeros(problem.n)
    history: List[float] = []
    iterates: List[np.ndarray] = [x.copy()] if cfg.record_iterates else []
    status = SolverStatus.MAX_ITERS

    logger.debug(f"{solver}: n={problem.n} variant={VariantKind(cfg.variant).value} tol={cfg.tol:.1e} limit={limit}")
    for k in range(1, limit + 1):
        try:
            x = step(problem, x, k)
        except SingularSystemError as e:
            logger.warning(f"{solver}: singular system at step {k}: {e}")
            status = SolverStatus.NUMERIC_FAILURE
            break
        history.append(residual_norm(problem, x))
        if cfg.record_iterates:
            iterates.append(x.copy())
        if history[-1] <= cfg.tol:
            status = SolverStatus.CONVERGED
            break

    if status is SolverStatus.MAX_ITERS:
        logger.warning(f"{solver}: no convergence in {limit} steps (residual {history[-1]:.3e})")
    else:
        logger.debug(f"{solver}: {status.value} after {len(history)} steps")

    return SolverReport(
        solver=solver,
        variant=VariantKind(cfg.variant).value,
        solution=x,
        iterations=len(history),
        residual_history=history,
        status=status,
        minimality=certify(p, x),
        iterates=iterates,
    )


def _depth_step(p: QveProblem, x: np.ndarray, k: int) -> np.ndarray:
    return linear_solve(np.eye(p.n) - left_matrix(p.b, x), p.a)


def _order_step(p: QveProblem, x: np.ndarray, k: int) -> np.ndarray:
    return linear_solve(np.eye(p.n) - right_matrix(p.b, x), p.a)


def _thicknesses_step(p: QveProblem, x: np.ndarray, k: int) -> np.ndarray:
    # odd steps are depth steps, so the run starts with depth
    return _depth_step(p, x, k) if k % 2 == 1 else _order_step(p, x, k)


def _newton_step(p: QveProblem, x: np.ndarray, k: int) -> np.ndarray:
    return linear_solve(jacobian(p, x), p.a - eval_bilinear(p.b, x, x))


def depth_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """(I - b(., x_k)) x_{k+1} = a."""
    return _run_classical(p, cfg or SolverConfig(), 'depth', _depth_step, LINEAR_MAX_ITERS)


def order_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """(I - b(x_k, .)) x_{k+1} = a."""
    return _run_classical(p, cfg or SolverConfig(), 'order', _order_step, LINEAR_MAX_ITERS)


def thicknesses_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """Alternating depth and order steps, depth first."""
    return _run_classical(p, cfg or SolverConfig(), 'thicknesses', _thicknesses_step, LINEAR_MAX_ITERS)


def newton_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """(I - b(x_k, .) - b(., x_k)) x_{k+1} = a - b(x_k, x_k)."""
    return _run_classical(p, cfg or SolverConfig(), 'newton', _newton_step, NEWTON_MAX_ITERS)
