"""
Structural analysis of a quadratic vector equation.
Criticality from the mean matrix R, the strongly connected block structure
of R, the back-substitution reduction for reducible R, and the M-matrix
certificate of minimality.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List

import numpy as np

from ..utils.config import CRIT_CERTIFY_TOL, CRIT_TOL, DEFAULT_TOL
from .errors import QveInputError, StructureError
from .linalg import MmatrixClass, MmatrixVerdict, linear_solve, mmatrix_classify, scc_partition, spectral_radius
from .problem import (
    BilinearTensor,
    QveProblem,
    as_vector,
    eval_bilinear,
    jacobian,
    left_matrix,
    mean_matrix,
    residual,
    right_matrix,
)

logger = logging.getLogger(__name__)


class Criticality(str, Enum):
    SUBCRITICAL = 'subcritical'
    CRITICAL = 'critical'
    SUPERCRITICAL = 'supercritical'


@dataclass(frozen=True)
class StructureReport:
    rho_R: float
    criticality: Criticality
    components: List[List[int]]
    irreducible: bool
    block_radii: List[float] = field(default_factory=list)


@dataclass(frozen=True)
class ReducedProblem:
    """
    Split of a reducible problem into a self-contained tail block and a head
    block whose equation depends on the tail solution.
    """
    permutation: np.ndarray
    head: List[int]
    tail: List[int]
    tail_problem: QveProblem


def criticality_of(rho: float, crit_tol: float = CRIT_TOL) -> Criticality:
    if abs(rho - 1.0) <= crit_tol:
        return Criticality.CRITICAL
    return Criticality.SUBCRITICAL if rho < 1.0 else Criticality.SUPERCRITICAL


def classify(p: QveProblem) -> StructureReport:
    """rho(R), the sub/super/critical class and the SCC blocks of R."""
    mean = mean_matrix(p)
    components = scc_partition(mean > 0)
    radii = [spectral_radius(mean[np.ix_(block, block)]) for block in components]
    rho = max(radii)
    return StructureReport(
        rho_R=rho,
        criticality=criticality_of(rho),
        components=components,
        irreducible=len(components) == 1,
        block_radii=radii,
    )


def is_irreducible(p: QveProblem) -> bool:
    return len(scc_partition(mean_matrix(p) > 0)) == 1


def split_reducible(p: QveProblem) -> ReducedProblem:
    """
    Take the last strongly connected block of R as the tail. It is closed:
    b_ijk = 0 whenever i is in the tail and j or k is not, so the tail
    equation is the restriction of the problem to the tail indices.
    """
    components = scc_partition(mean_matrix(p) > 0)
    if len(components) < 2:
        raise QveInputError("split_reducible needs a reducible mean matrix")

    tail = components[-1]
    head = [i for block in components[:-1] for i in block]
    a_tail = p.a[tail]
    b_tail = p.b.coeffs[np.ix_(tail, tail, tail)]
    tail_problem = QveProblem(a_tail, BilinearTensor(b_tail), require_stochastic=p.stochastic)
    logger.debug(f"Split n={p.n} into head of {len(head)} and tail of {len(tail)} states")
    return ReducedProblem(
        permutation=np.array(head + tail, dtype=np.int64),
        head=head,
        tail=tail,
        tail_problem=tail_problem,
    )


def head_problem(p: QveProblem, reduced: ReducedProblem, x2) -> QveProblem:
    """
    The head equation x1 = a_y + b_y(x1, x1) for the tail solution y = x2:
    T_y = I - Pb(., Q^T y)P^T - Pb(Q^T y, .)P^T, a_y = T_y^{-1}(a_1 + Pb(Q^T y, Q^T y)),
    b_y(u, v) = T_y^{-1} Pb(P^T u, P^T v).

    Raises:
        StructureError: T_y is not a nonsingular M-matrix
    """
    head, tail = reduced.head, reduced.tail
    x2 = as_vector(x2, len(tail), 'x2')
    lifted = np.zeros(p.n)
    lifted[tail] = x2

    block = np.ix_(head, head)
    t_matrix = np.eye(len(head)) - left_matrix(p.b, lifted)[block] - right_matrix(p.b, lifted)[block]
    verdict = mmatrix_classify(t_matrix)
    if verdict.classification is not MmatrixClass.NONSINGULAR:
        raise StructureError(
            f"Head matrix T is {verdict.classification.value}; the minimal solution probably has zero entries"
        )

    m = len(head)
    a_rhs = p.a[head] + eval_bilinear(p.b, lifted, lifted)[head]
    a_head = np.maximum(linear_solve(t_matrix, a_rhs), 0.0)
    b_rows = p.b.coeffs[np.ix_(head, head, head)].reshape(m, m * m)
    b_head = np.maximum(linear_solve(t_matrix, b_rows), 0.0).reshape(m, m, m)
    return QveProblem.relaxed(a_head, BilinearTensor(b_head))


def back_substitute(p: QveProblem, reduced: ReducedProblem, x2,
                    inner_solver: Callable[[QveProblem], np.ndarray]) -> np.ndarray:
    """Solve the head equation with `inner_solver` and assemble the full solution."""
    if not reduced.head:
        raise QveInputError("back_substitute needs a nonempty head block")
    x2 = as_vector(x2, len(reduced.tail), 'x2')
    x1 = np.asarray(inner_solver(head_problem(p, reduced, x2)), dtype=np.float64)
    solution = np.empty(p.n)
    solution[reduced.head] = x1
    solution[reduced.tail] = x2
    return solution


def reduce_and_solve(p: QveProblem, piece_solver: Callable[[QveProblem], np.ndarray]) -> np.ndarray:
    """
    Minimal solution through repeated tail/head splitting until every piece
    handed to `piece_solver` has an irreducible mean matrix.
    """
    if is_irreducible(p):
        return np.asarray(piece_solver(p), dtype=np.float64)
    reduced = split_reducible(p)
    x2 = reduce_and_solve(reduced.tail_problem, piece_solver)
    return back_substitute(p, reduced, x2, lambda head: reduce_and_solve(head, piece_solver))


def jacobian_verdict(p: QveProblem, x) -> MmatrixVerdict:
    """
    mmatrix_classify on F'_x. At x = e the Jacobian is I - R, so a problem
    classified critical there is certified singular_M, not not_M.
    """
    x = as_vector(x, p.n, 'x')
    if np.all(x == 1.0):
        return mmatrix_classify(jacobian(p, x), abs_tol=CRIT_CERTIFY_TOL)
    return mmatrix_classify(jacobian(p, x))


def certify_minimal(p: QveProblem, x, tol: float = 10 * DEFAULT_TOL) -> MmatrixVerdict:
    """
    Minimality test for a positive solution: F'_x is an M-matrix exactly when
    x is the minimal solution (R irreducible).

    Raises:
        QveInputError: x is not positive or not a solution within `tol`
    """
    x = as_vector(x, p.n, 'x')
    if np.any(x <= 0):
        raise QveInputError("Minimality certificate needs a strictly positive solution")
    defect = float(np.max(np.abs(residual(p, x))))
    if defect > tol:
        raise QveInputError(f"x is not a solution: residual {defect:.3e} > {tol:.1e}")
    if not is_irreducible(p):
        logger.debug("Certificate on a reducible problem only certifies one direction")
    return jacobian_verdict(p, x)
