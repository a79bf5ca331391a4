"""
Problem data model for the quadratic vector equation x = a + b(x, x).
Holds the bilinear tensor, its contractions, the residual map and its
Jacobian, and the equivalent re-splittings of the bilinear form.
"""
import logging
from enum import Enum
from typing import Iterable, Sequence, Tuple

import numpy as np

from ..utils.config import STOCHASTIC_TOL
from .errors import QveInputError

logger = logging.getLogger(__name__)


class VariantKind(str, Enum):
    """Ways of re-splitting b_ijk + b_ikj between the two arguments."""
    ORIGINAL = 'original'
    TRANSPOSE = 'transpose'
    SYMMETRIZE = 'symmetrize'
    DESYM1 = 'desym1'
    DESYM2 = 'desym2'


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def as_vector(values, n: int, name: str = 'vector') -> np.ndarray:
    """Convert to a float64 vector of length n or raise QveInputError."""
    vector = np.asarray(values, dtype=np.float64)
    if vector.shape != (n,):
        raise QveInputError(f"{name} must have shape ({n},), got {vector.shape}")
    return vector


class BilinearTensor:
    """Dense N x N x N coefficient array b_ijk with b(x, y)_i = sum_jk b_ijk x_j y_k."""

    __slots__ = ('n', 'coeffs', '_swapped')

    def __init__(self, coeffs):
        array = np.array(coeffs, dtype=np.float64)
        if array.ndim != 3 or array.shape[0] == 0 or len(set(array.shape)) != 1:
            raise QveInputError(f"Bilinear coefficients must be an N x N x N array, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise QveInputError("Bilinear coefficients must be finite")
        if np.any(array < 0):
            raise QveInputError(f"Bilinear coefficients must be nonnegative (min {array.min():.3e})")
        self.n = array.shape[0]
        self.coeffs = _frozen(array)
        # b_ikj laid out contiguously so that b(x, .) is a plain matrix-vector product
        self._swapped = _frozen(np.ascontiguousarray(np.swapaxes(array, 1, 2)))

    @classmethod
    def from_triples(cls, n: int, entries: Iterable[Sequence]) -> 'BilinearTensor':
        """Densify a sparse list of [i, j, k, value]; repeated indices accumulate."""
        if n < 1:
            raise QveInputError(f"Dimension must be positive, got {n}")
        coeffs = np.zeros((n, n, n), dtype=np.float64)
        for entry in entries:
            if len(entry) != 4:
                raise QveInputError(f"Tensor entry must be [i, j, k, value], got {entry!r}")
            i, j, k, value = entry
            for index in (i, j, k):
                if isinstance(index, bool) or int(index) != index or not 0 <= int(index) < n:
                    raise QveInputError(f"Tensor index {index!r} out of range for n={n}")
            coeffs[int(i), int(j), int(k)] += float(value)
        return cls(coeffs)

    def to_triples(self) -> list:
        """Nonzero entries as [i, j, k, value] in lexicographic order."""
        return [[int(i), int(j), int(k), float(self.coeffs[i, j, k])]
                for i, j, k in zip(*np.nonzero(self.coeffs))]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BilinearTensor):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.n, self.coeffs.tobytes()))

    def __repr__(self) -> str:
        return f"BilinearTensor(n={self.n}, nnz={np.count_nonzero(self.coeffs)})"


class QveProblem:
    """
    The equation x = a + b(x, x) with a >= 0 and b >= 0.

    Regular problems satisfy a + b(e, e) = e within STOCHASTIC_TOL. Problems
    built with `relaxed` only need a + b(e, e) <= e; they arise as head
    blocks of the reducible-case reduction.
    """

    __slots__ = ('n', 'a', 'b', 'stochastic')

    def __init__(self, a, b: BilinearTensor, *, stochastic_tol: float = STOCHASTIC_TOL,
                 require_stochastic: bool = True):
        if not isinstance(b, BilinearTensor):
            b = BilinearTensor(b)
        a = np.array(as_vector(a, b.n, 'a'), dtype=np.float64)
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise QveInputError("Immediate-death vector a must be finite and nonnegative")

        row_sums = a + eval_bilinear(b, np.ones(b.n), np.ones(b.n))
        excess = float(np.max(row_sums - 1.0))
        defect = float(np.max(np.abs(row_sums - 1.0)))
        if require_stochastic and defect > stochastic_tol:
            raise QveInputError(
                f"a + b(e,e) deviates from e by {defect:.3e} (tolerance {stochastic_tol:.1e}); "
                f"use renormalization to rescale"
            )
        if excess > stochastic_tol:
            raise QveInputError(f"a + b(e,e) exceeds e by {excess:.3e}")

        self.n = b.n
        self.a = _frozen(a)
        self.b = b
        self.stochastic = defect <= stochastic_tol

    @classmethod
    def relaxed(cls, a, b: BilinearTensor) -> 'QveProblem':
        """Build a problem that only needs a + b(e, e) <= e."""
        return cls(a, b, require_stochastic=False)

    @classmethod
    def renormalized(cls, a, b: BilinearTensor) -> Tuple['QveProblem', float]:
        """
        Rescale by K = max_i (a + b(e, e))_i the way the random generator does:
        b' = b / K and a' = (K e - b(e, e)) / K, so that a' + b'(e, e) = e.
        Rows whose sum was below K get their death probability raised.

        Returns:
            The rescaled problem and K
        """
        if not isinstance(b, BilinearTensor):
            b = BilinearTensor(b)
        a = as_vector(a, b.n, 'a')
        ones = np.ones(b.n)
        branching = eval_bilinear(b, ones, ones)
        scale = float(np.max(a + branching))
        if not scale > 0:
            raise QveInputError("Cannot renormalize a problem with a = 0 and b = 0")

        new_a = (scale - branching) / scale
        shift = float(np.max(np.abs(new_a - a / scale)))
        logger.info(f"Renormalizing problem by K={scale!r}")
        if shift > STOCHASTIC_TOL:
            logger.warning(f"Renormalization changed death probabilities by up to {shift:.3e}")
        return cls(new_a, BilinearTensor(b.coeffs / scale)), scale

    def with_tensor(self, b: BilinearTensor) -> 'QveProblem':
        """Same a with another bilinear form of the same quadratic form."""
        return QveProblem(self.a, b, require_stochastic=self.stochastic)

    def with_variant(self, kind) -> 'QveProblem':
        kind = VariantKind(kind)
        if kind is VariantKind.ORIGINAL:
            return self
        return self.with_tensor(variant(self.b, kind))

    def __eq__(self, other) -> bool:
        if not isinstance(other, QveProblem):
            return NotImplemented
        return self.b == other.b and np.array_equal(self.a, other.a)

    def __hash__(self):
        return hash((self.a.tobytes(), self.b))

    def __repr__(self) -> str:
        return f"QveProblem(n={self.n}, stochastic={self.stochastic})"


def left_matrix(b: BilinearTensor, y) -> np.ndarray:
    """Matrix of b(., y): M_ij = sum_k b_ijk y_k."""
    y = as_vector(y, b.n, 'y')
    return b.coeffs @ y


def right_matrix(b: BilinearTensor, x) -> np.ndarray:
    """Matrix of b(x, .): M_ik = sum_j b_ijk x_j."""
    x = as_vector(x, b.n, 'x')
    return b._swapped @ x


def eval_bilinear(b: BilinearTensor, x, y) -> np.ndarray:
    """b(x, y)_i = sum_jk b_ijk x_j y_k."""
    x = as_vector(x, b.n, 'x')
    return left_matrix(b, y) @ x


def mean_matrix(p: QveProblem) -> np.ndarray:
    """R = b(e, .) + b(., e)."""
    ones = np.ones(p.n)
    return right_matrix(p.b, ones) + left_matrix(p.b, ones)


def residual(p: QveProblem, x) -> np.ndarray:
    """F(x) = x - a - b(x, x)."""
    x = as_vector(x, p.n, 'x')
    return x - p.a - eval_bilinear(p.b, x, x)


def jacobian(p: QveProblem, x) -> np.ndarray:
    """F'_x = I - b(x, .) - b(., x)."""
    x = as_vector(x, p.n, 'x')
    return np.eye(p.n) - right_matrix(p.b, x) - left_matrix(p.b, x)


def variant(b: BilinearTensor, kind) -> BilinearTensor:
    """Another bilinear form with the same quadratic form b(t, t)."""
    kind = VariantKind(kind)
    if kind is VariantKind.ORIGINAL:
        return b
    if kind is VariantKind.TRANSPOSE:
        return BilinearTensor(b._swapped)
    if kind is VariantKind.SYMMETRIZE:
        return BilinearTensor(0.5 * (b.coeffs + b._swapped))

    pair_sum = b.coeffs + b._swapped
    diagonal = np.zeros_like(b.coeffs)
    idx = np.arange(b.n)
    diagonal[:, idx, idx] = b.coeffs[:, idx, idx]
    # mask over (j, k): strictly upper for desym1, strictly lower for desym2
    upper = np.triu(np.ones((b.n, b.n), dtype=bool), k=1)
    mask = upper if kind is VariantKind.DESYM1 else upper.T
    return BilinearTensor(np.where(mask[None, :, :], pair_sum, 0.0) + diagonal)


def problem_from_arrays(a, coeffs, renormalize: bool = False) -> QveProblem:
    """Build a problem from raw arrays, optionally rescaling to a + b(e, e) = e."""
    b = BilinearTensor(coeffs)
    if renormalize:
        problem, _ = QveProblem.renormalized(a, b)
        return problem
    return QveProblem(a, b)


def deduce_death_vector(b: BilinearTensor, stochastic_tol: float = STOCHASTIC_TOL) -> np.ndarray:
    """a = e - b(e, e), with tiny negative entries clipped to zero."""
    ones = np.ones(b.n)
    deduced = ones - eval_bilinear(b, ones, ones)
    if np.any(deduced < -stochastic_tol):
        raise QveInputError(f"b(e,e) exceeds e by {-deduced.min():.3e}; cannot deduce a")
    return np.maximum(deduced, 0.0)
