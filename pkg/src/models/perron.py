"""
Perron-vector iterations on the survival probabilities y = e - x.
The supercritical minimal solution is the y for which H_y = b(., e) + b(e - y, .)
has Perron value 1 and y is its suitably scaled Perron vector.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..utils.config import (
    DEGENERATE_PROJECTION_TOL,
    LAMBDA_STAR_TOL,
    PERRON_MAX_ITERS,
    PERRON_START_EPS,
)
from .classical import (
    SolverConfig,
    SolverReport,
    SolverStatus,
    certify,
    critical_shortcut,
    residual_norm,
)
from .errors import (
    DegenerateProjectionError,
    IrreducibilityError,
    NoConvergenceError,
    NormalizationError,
    NumericError,
    QveInputError,
    ReducibleInputError,
)
from .linalg import linear_solve, perron_left, perron_right, pseudo_inverse_apply
from .problem import QveProblem, VariantKind, as_vector, eval_bilinear, jacobian, left_matrix, mean_matrix, right_matrix
from .structure import Criticality, classify

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PerronStepTrace:
    """One application of the Perron map y -> G(y)."""
    eigenvalue: float
    y_next: np.ndarray
    residual_norm: float


def survival_matrix(p: QveProblem, y) -> np.ndarray:
    """H_y = b(., e) + b(e - y, .)."""
    y = as_vector(y, p.n, 'y')
    ones = np.ones(p.n)
    return left_matrix(p.b, ones) + right_matrix(p.b, ones - y)


def normalize_perron(p: QveProblem, w, u) -> np.ndarray:
    """
    Scale u so that w^T (y - b(y, e) - b(e, y) + b(y, y)) = 0.

    Raises:
        NormalizationError: the scale factor is not positive
    """
    w = as_vector(w, p.n, 'w')
    u = as_vector(u, p.n, 'u')
    ones = np.ones(p.n)
    linear = float(w @ (eval_bilinear(p.b, u, ones) + eval_bilinear(p.b, ones, u) - u))
    quadratic = float(w @ eval_bilinear(p.b, u, u))
    if quadratic <= 0:
        raise NormalizationError(f"w^T b(u, u) = {quadratic:.3e} is not positive")
    alpha = linear / quadratic
    if alpha <= 0:
        raise NormalizationError(f"Normalization factor {alpha:.3e} is not positive; problem is not supercritical")
    return alpha * u


def perron_iteration_step(p: QveProblem, w, y) -> PerronStepTrace:
    """Perron vector of H_y, normalized against w."""
    pair = perron_right(survival_matrix(p, y))
    y_next = normalize_perron(p, w, pair.vector)
    defect = float(np.max(np.abs(y_next - survival_matrix(p, y_next) @ y_next)))
    return PerronStepTrace(eigenvalue=pair.value, y_next=y_next, residual_norm=defect)


def _mean_left_vector(p: QveProblem) -> np.ndarray:
    return perron_left(mean_matrix(p)).vector


def _prepare(p: QveProblem, cfg: SolverConfig, solver: str):
    if not p.stochastic:
        raise QveInputError(f"{solver} needs a + b(e,e) = e")
    structure = classify(p)
    shortcut = critical_shortcut(p, cfg, solver, (Criticality.CRITICAL, Criticality.SUBCRITICAL), structure)
    if shortcut is not None:
        return None, None, shortcut
    if not structure.irreducible:
        raise ReducibleInputError(
            f"{solver} needs an irreducible mean matrix; R has {len(structure.components)} blocks"
        )
    problem = p.with_variant(cfg.variant)
    return problem, _mean_left_vector(problem), None


def _starting_point(p: QveProblem, first_step):
    """Run `first_step` from y = e, falling back to (1 - eps) e when H_e is reducible."""
    y = np.ones(p.n)
    try:
        return y, first_step(y)
    except IrreducibilityError:
        logger.debug("H_e is reducible; starting from (1 - eps) e")
        y = np.full(p.n, 1.0 - PERRON_START_EPS)
        return y, first_step(y)


def _accept_limit(p: QveProblem, y: np.ndarray, cfg: SolverConfig, solver: str) -> np.ndarray:
    slack = 10 * cfg.tol
    if np.any(y < -slack) or np.any(y > 1.0 + slack):
        raise NoConvergenceError(
            f"{solver}: limit leaves [0, e] (min {y.min():.3e}, max {y.max():.3e})"
        )
    y = np.clip(y, 0.0, 1.0)
    value = perron_right(survival_matrix(p, y)).value
    if abs(value - 1.0) > LAMBDA_STAR_TOL:
        raise NoConvergenceError(f"{solver}: rho(H_y) = {value:.12g} at the limit, expected 1")
    return y


def _report(p: QveProblem, cfg: SolverConfig, solver: str, y: np.ndarray, iterations: int,
            history: List[float], eigenvalues: List[float], iterates: List[np.ndarray],
            status: SolverStatus) -> SolverReport:
    x = 1.0 - y
    return SolverReport(
        solver=solver,
        variant=VariantKind(cfg.variant).value,
        solution=x,
        iterations=iterations,
        residual_history=history,
        status=status,
        minimality=certify(p, x),
        eigenvalue_history=eigenvalues,
        iterates=iterates,
    )


def perron_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """
    Fixed-point iteration y_{k+1} = G(y_k) on the survival vector.

    Raises:
        QveInputError: the problem is not stochastic
        ReducibleInputError: R is reducible
        NoConvergenceError: the limit fails the box or eigenvalue check
    """
    cfg = cfg or SolverConfig()
    solver = 'perron'
    problem, w, shortcut = _prepare(p, cfg, solver)
    if shortcut is not None:
        return shortcut

    limit = cfg.iteration_limit(PERRON_MAX_ITERS)
    history: List[float] = []
    eigenvalues: List[float] = []
    iterates: List[np.ndarray] = []
    status = SolverStatus.MAX_ITERS
    y = np.ones(problem.n)

    def step(current):
        return perron_iteration_step(problem, w, current)

    try:
        y, trace = _starting_point(problem, step)
        for k in range(1, limit + 1):
            if k > 1:
                trace = step(y)
            change = float(np.max(np.abs(trace.y_next - y)))
            y = trace.y_next
            history.append(residual_norm(problem, 1.0 - y))
            eigenvalues.append(trace.eigenvalue)
            if cfg.record_iterates:
                iterates.append(1.0 - y)
            if change <= cfg.tol:
                status = SolverStatus.CONVERGED
                break
    except NumericError as e:
        logger.warning(f"{solver}: {type(e).__name__} after {len(history)} steps: {e}")
        status = SolverStatus.NUMERIC_FAILURE

    if status is SolverStatus.CONVERGED:
        y = _accept_limit(problem, y, cfg, solver)
        logger.debug(f"{solver}: converged after {len(history)} steps")
    elif status is SolverStatus.MAX_ITERS:
        logger.warning(f"{solver}: no convergence in {limit} steps")
    return _report(p, cfg, solver, y, len(history), history, eigenvalues, iterates, status)


def _newton_parts(p: QveProblem, w: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float, np.ndarray]:
    """G(y), rho(H_y) and the Jacobian of G at y."""
    h_matrix = survival_matrix(p, y)
    right = perron_right(h_matrix)
    u = normalize_perron(p, w, right.vector)
    v = perron_left(h_matrix).vector

    ones = np.ones(p.n)
    sigma = jacobian(p, ones - u).T @ w
    sigma_u = float(sigma @ u)
    v_u = float(v @ u)
    u_norm = float(np.linalg.norm(u))
    if abs(sigma_u) < DEGENERATE_PROJECTION_TOL * float(np.linalg.norm(sigma)) * u_norm:
        raise DegenerateProjectionError(f"sigma^T u = {sigma_u:.3e} is numerically zero")
    if abs(v_u) < DEGENERATE_PROJECTION_TOL * float(np.linalg.norm(v)) * u_norm:
        raise DegenerateProjectionError(f"v^T u = {v_u:.3e} is numerically zero")

    b_u = left_matrix(p.b, u)
    projected = b_u - np.outer(u, v @ b_u) / v_u
    middle = pseudo_inverse_apply(h_matrix - right.value * np.eye(p.n), projected)
    jac = middle - np.outer(u, sigma @ middle) / sigma_u
    return u, right.value, jac


def perron_jacobian(p: QveProblem, w, y) -> np.ndarray:
    """
    Jacobian of the Perron map at y:
    (I - u s^T / s^T u) (H_y - lambda I)^+ (I - u v^T / v^T u) b(., u)
    with u = G(y), v the left Perron vector of H_y and s^T = w^T F'_{e-u}.

    Raises:
        DegenerateProjectionError: s^T u or v^T u vanishes
    """
    w = as_vector(w, p.n, 'w')
    y = as_vector(y, p.n, 'y')
    return _newton_parts(p, w, y)[2]


def perron_newton_solve(p: QveProblem, cfg: Optional[SolverConfig] = None) -> SolverReport:
    """
    Newton's method on y - G(y) = 0: y <- y - (I - J_G)^{-1} (y - G(y)).

    Raises:
        QveInputError: the problem is not stochastic
        ReducibleInputError: R is reducible
        NoConvergenceError: the limit fails the box or eigenvalue check
    """
    cfg = cfg or SolverConfig()
    solver = 'perron-newton'
    problem, w, shortcut = _prepare(p, cfg, solver)
    if shortcut is not None:
        return shortcut

    limit = cfg.iteration_limit(PERRON_MAX_ITERS)
    history: List[float] = []
    eigenvalues: List[float] = []
    iterates: List[np.ndarray] = []
    status = SolverStatus.MAX_ITERS
    y = np.ones(problem.n)
    identity = np.eye(problem.n)

    def parts(current):
        return _newton_parts(problem, w, current)

    try:
        y, (u, value, jac) = _starting_point(problem, parts)
        for k in range(1, limit + 1):
            if k > 1:
                u, value, jac = parts(y)
            eigenvalues.append(value)
            step = y - u
            if float(np.max(np.abs(step))) <= cfg.tol:
                y = u
                status = SolverStatus.CONVERGED
            else:
                y = y - linear_solve(identity - jac, step)
            history.append(residual_norm(problem, 1.0 - y))
            if cfg.record_iterates:
                iterates.append(1.0 - y)
            if status is SolverStatus.CONVERGED:
                break
    except NumericError as e:
        logger.warning(f"{solver}: {type(e).__name__} after {len(history)} steps: {e}")
        status = SolverStatus.NUMERIC_FAILURE

    if status is SolverStatus.CONVERGED:
        y = _accept_limit(problem, y, cfg, solver)
        logger.debug(f"{solver}: converged after {len(history)} steps")
    elif status is SolverStatus.MAX_ITERS:
        logger.warning(f"{solver}: no convergence in {limit} steps")
    return _report(p, cfg, solver, y, len(history), history, eigenvalues, iterates, status)
