"""
Dense linear-algebra kernel for the solvers.
Dominant eigenpairs of nonnegative matrices by power iteration, LU solves
with a singularity guard, truncated-SVD pseudo-inverse, M-matrix
classification and strongly connected components of a sparsity pattern.
"""
import itertools
import logging
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np
import scipy.linalg

from ..utils.config import (
    EIG_SHIFT_FRACTION,
    EIG_TOL,
    MACHINE_EPS,
    MAX_EIG_ITERS,
    MMATRIX_TOL,
    OFFDIAG_SIGN_TOL,
    POSITIVITY_TOL,
    RANK_TOL_FACTOR,
    SOLVE_TOL,
)
from .errors import (
    EigenConvergenceError,
    IrreducibilityError,
    NumericError,
    QveInputError,
    SingularSystemError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EigenPair:
    """Dominant eigenvalue and its eigenvector, normalized to unit 1-norm."""
    value: float
    vector: np.ndarray


class MmatrixClass(str, Enum):
    NONSINGULAR = 'nonsingular_M'
    SINGULAR = 'singular_M'
    NOT_M = 'not_M'


@dataclass(frozen=True)
class MmatrixVerdict:
    """Outcome of writing Z = sI - B with B >= 0 and comparing rho(B) to s."""
    classification: MmatrixClass
    rho_offdiag: float
    shift: float

    @property
    def is_m_matrix(self) -> bool:
        return self.classification is not MmatrixClass.NOT_M


def _square(matrix, name: str = 'matrix') -> np.ndarray:
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
        raise QveInputError(f"{name} must be a nonempty square matrix, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise QveInputError(f"{name} has non-finite entries")
    return array


def _power_iteration(matrix: np.ndarray, tol: float, max_iters: int) -> Tuple[float, np.ndarray, bool]:
    """1-norm normalized power iteration started from the all-ones vector."""
    n = matrix.shape[0]
    vector = np.full(n, 1.0 / n)
    for _ in range(max_iters):
        image = matrix @ vector
        norm = float(np.abs(image).sum())
        if norm == 0.0:
            # nilpotent direction: spectral radius 0
            return 0.0, vector, True
        image /= norm
        if float(np.max(np.abs(image - vector))) <= tol:
            return float(np.abs(matrix @ image).sum()), image, True
        vector = image
    return norm, vector, False


def _dominant_pair(matrix: np.ndarray, tol: float = EIG_TOL, max_iters: int = MAX_EIG_ITERS) -> Tuple[float, np.ndarray]:
    value, vector, converged = _power_iteration(matrix, tol, max_iters)
    if converged:
        return value, vector

    # Near-ties on the spectral circle: M + delta*I keeps the eigenvectors
    # and separates the dominant eigenvalue.
    delta = float(np.max(np.abs(matrix).sum(axis=1))) * EIG_SHIFT_FRACTION
    logger.debug(f"Power iteration stalled after {max_iters} steps; retrying with shift {delta:.3e}")
    shifted = matrix + delta * np.eye(matrix.shape[0])
    value, vector, converged = _power_iteration(shifted, tol, max_iters)
    if not converged:
        raise EigenConvergenceError(f"Power iteration did not converge in {max_iters} steps, even shifted")
    return value - delta, vector


def perron_right(matrix) -> EigenPair:
    """
    Spectral radius and right Perron vector of a nonnegative irreducible matrix.

    Raises:
        EigenConvergenceError: power iteration did not converge
        IrreducibilityError: the matrix graph is not strongly connected, or the
            vector has an entry that is not clearly positive
    """
    matrix = _square(matrix)
    components = scc_partition(matrix != 0)
    if len(components) > 1:
        raise IrreducibilityError(f"Matrix is reducible: {len(components)} strongly connected components")
    value, vector = _dominant_pair(matrix)
    if float(np.min(vector)) <= POSITIVITY_TOL * float(np.max(np.abs(vector))):
        raise IrreducibilityError(
            f"Dominant eigenvector has a non-positive entry ({np.min(vector):.3e}); matrix looks reducible"
        )
    return EigenPair(value=value, vector=vector)


def perron_left(matrix) -> EigenPair:
    """Left Perron pair: v^T M = rho v^T."""
    return perron_right(_square(matrix).T)


def spectral_radius(matrix) -> float:
    """rho of a nonnegative matrix, taken as the max over its irreducible diagonal blocks."""
    matrix = _square(matrix)
    radius = 0.0
    for component in scc_partition(matrix != 0):
        block = matrix[np.ix_(component, component)]
        if len(component) == 1:
            radius = max(radius, abs(float(block[0, 0])))
        else:
            radius = max(radius, _dominant_pair(block)[0])
    return radius


def pseudo_inverse_apply(matrix, rhs) -> np.ndarray:
    """M^+ X through a truncated SVD; singular values <= N*eps*sigma_max count as zero."""
    matrix = _square(matrix)
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != matrix.shape[0]:
        raise QveInputError(f"Right-hand side has {rhs.shape[0]} rows, matrix has {matrix.shape[0]}")
    try:
        u, sigma, vh = scipy.linalg.svd(matrix, full_matrices=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericError(f"SVD did not converge: {e}") from e

    cutoff = matrix.shape[0] * RANK_TOL_FACTOR * (sigma[0] if sigma.size else 0.0)
    rank = int(np.count_nonzero(sigma > cutoff))
    if rank == 0:
        return np.zeros((matrix.shape[1],) + rhs.shape[1:])
    projected = u[:, :rank].T @ rhs
    if projected.ndim == 1:
        projected = projected / sigma[:rank]
    else:
        projected = projected / sigma[:rank, None]
    return vh[:rank].T @ projected


def mmatrix_classify(z_matrix, abs_tol: float = 0.0) -> MmatrixVerdict:
    """
    Decide whether a Z-matrix is a nonsingular M-matrix, a singular one, or neither.

    Writes Z = sI - B with s = max_i Z_ii and compares rho(B) with s using a
    relative tolerance of MMATRIX_TOL, widened to `abs_tol` when that is larger.
    """
    z_matrix = _square(z_matrix, 'Z')
    off_diagonal = z_matrix - np.diag(np.diag(z_matrix))
    if float(np.max(off_diagonal)) > OFFDIAG_SIGN_TOL:
        raise QveInputError(f"Not a Z-matrix: positive off-diagonal entry {np.max(off_diagonal):.3e}")

    shift = float(np.max(np.diag(z_matrix)))
    nonnegative_part = np.maximum(shift * np.eye(z_matrix.shape[0]) - z_matrix, 0.0)
    rho = spectral_radius(nonnegative_part)

    band = max(MMATRIX_TOL * abs(shift), abs_tol)
    if rho < shift - band:
        classification = MmatrixClass.NONSINGULAR
    elif abs(rho - shift) <= band:
        classification = MmatrixClass.SINGULAR
    else:
        classification = MmatrixClass.NOT_M
    return MmatrixVerdict(classification=classification, rho_offdiag=rho, shift=shift)


def scc_partition(pattern) -> List[List[int]]:
    """
    Strongly connected components of the graph with an edge i -> j iff pattern[i, j].

    Components come sources-first, so relabeling the indices by the
    concatenated list makes the pattern block upper triangular. Indices
    inside a component are sorted.
    """
    pattern = np.asarray(pattern, dtype=bool)
    if pattern.ndim != 2 or pattern.shape[0] != pattern.shape[1]:
        raise QveInputError(f"Pattern must be square, got shape {pattern.shape}")
    n = pattern.shape[0]
    neighbours = [np.flatnonzero(pattern[i]).tolist() for i in range(n)]

    # Tarjan's algorithm with an explicit stack; emits sinks first
    counter = itertools.count()
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    components = []

    # descending roots keep the identity order when it is already valid
    for root in reversed(range(n)):
        if root in index:
            continue
        index[root] = lowlink[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(neighbours[root]))]
        while work:
            v, successors = work[-1]
            descended = False
            for w in successors:
                if w not in index:
                    index[w] = lowlink[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(neighbours[w])))
                    descended = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if descended:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))

    components.reverse()
    return components


def linear_solve(matrix, rhs) -> np.ndarray:
    """
    Solve A x = rhs by LU with partial pivoting.

    Raises:
        SingularSystemError: a pivot is below N * eps * ||A||_inf
    """
    matrix = _square(matrix, 'A')
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != matrix.shape[0]:
        raise QveInputError(f"Right-hand side has {rhs.shape[0]} rows, matrix has {matrix.shape[0]}")

    n = matrix.shape[0]
    norm = float(np.max(np.abs(matrix).sum(axis=1)))
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(matrix)
    smallest_pivot = float(np.min(np.abs(np.diag(lu))))
    if smallest_pivot <= n * MACHINE_EPS * norm:
        raise SingularSystemError(f"Pivot {smallest_pivot:.3e} below singularity threshold (||A||={norm:.3e})")

    solution = scipy.linalg.lu_solve((lu, piv), rhs)
    backward = float(np.max(np.abs(matrix @ solution - rhs)))
    if backward > SOLVE_TOL * norm * float(np.max(np.abs(solution))):
        logger.warning(f"Linear solve residual {backward:.3e} above tolerance")
    return solution
