"""
Reproducible test instances.
A SplitMix64 stream drives the random MBT family, the block triangular family
built from it, and the one-dimensional family with a known solution.
"""
import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..utils.config import BLOCK_COUPLING_WEIGHT, BLOCK_HEAD_INFLATION
from .errors import QveInputError
from .linalg import spectral_radius
from .problem import BilinearTensor, QveProblem, eval_bilinear

logger = logging.getLogger(__name__)

SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
MASK64 = 0xFFFFFFFFFFFFFFFF
UNIT_SCALE = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 output function."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over='ignore'):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


class Prng:
    """SplitMix64: the state advances by a fixed odd constant and each output is the mixed state."""

    __slots__ = ('state',)

    def __init__(self, seed: int):
        if int(seed) < 0 or int(seed) > MASK64:
            raise QveInputError(f"Seed must be a 64-bit unsigned integer, got {seed}")
        self.state = int(seed)

    def next_raw(self) -> int:
        self.state = (self.state + SPLITMIX_GAMMA) & MASK64
        return mix64(self.state)

    def next_unit(self) -> float:
        """Top 53 bits of the next output, scaled into [0, 1)."""
        return (self.next_raw() >> 11) * UNIT_SCALE

    def fill(self, count: int) -> np.ndarray:
        """The next `count` units as an array; same values as `count` calls to next_unit."""
        if count <= 0:
            return np.zeros(0)
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over='ignore'):
            states = np.uint64(self.state) + steps * np.uint64(SPLITMIX_GAMMA)
        self.state = (self.state + count * SPLITMIX_GAMMA) & MASK64
        return (mix64_array(states) >> np.uint64(11)).astype(np.float64) * UNIT_SCALE


class Family(str, Enum):
    RANDOM_MBT = 'random_mbt'
    SCALAR = 'scalar'
    BLOCK_TRIANGULAR = 'block_triangular'


class GeneratorSpec(BaseModel):
    """family, n, lambda and seed of a generated instance."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    family: Family
    n: int = Field(ge=1)
    lam: float = Field(alias='lambda', ge=0)
    seed: int = Field(0, ge=0, le=MASK64)

    @model_validator(mode='after')
    def _check_family(self) -> 'GeneratorSpec':
        if self.family is Family.SCALAR and not 0 < self.lam < 1:
            raise ValueError(f"scalar family needs 0 < lambda < 1, got {self.lam}")
        if self.family is Family.SCALAR and self.n != 1:
            raise ValueError("scalar family has n = 1")
        if self.family is Family.BLOCK_TRIANGULAR and self.n < 2:
            raise ValueError("block_triangular family needs n >= 2")
        return self

    @classmethod
    def parse(cls, text: str) -> 'GeneratorSpec':
        """Read 'family,n,lambda,seed' as given on the command line."""
        parts = [part.strip() for part in text.split(',')]
        if len(parts) != 4:
            raise QveInputError(f"Expected family,n,lambda,seed; got {text!r}")
        return build_spec(family=parts[0], n=parts[1], lam=parts[2], seed=parts[3])

    def with_lambda(self, lam: float) -> 'GeneratorSpec':
        return self.model_copy(update={'lam': float(lam)})

    def describe(self) -> dict:
        return {'family': self.family.value, 'n': self.n, 'lambda': self.lam, 'seed': self.seed}


def build_spec(**fields) -> GeneratorSpec:
    """GeneratorSpec with validation failures reported as QveInputError."""
    if 'lam' in fields:
        fields['lambda'] = fields.pop('lam')
    try:
        return GeneratorSpec(**fields)
    except ValidationError as e:
        raise QveInputError(f"Invalid generator spec: {e.errors()[0]['msg']}") from e


def _raw_tensor(n: int, seed: int) -> np.ndarray:
    # lexicographic (i, j, k) fill is the row-major order of the flat stream
    return Prng(seed).fill(n ** 3).reshape(n, n, n)


def _rescale(b0: np.ndarray, inflation: float):
    """a = (K e - s) / K and b = b0 / K with s = b0(e, e) and K = max s + inflation."""
    s = b0.sum(axis=(1, 2))
    scale = float(np.max(s)) + inflation
    return (scale - s) / scale, b0 / scale


def critical_lambda(spec: GeneratorSpec) -> float:
    """
    The lambda at which rho(R) = 1 for the random_mbt instance of this seed:
    rho(R0) - max_i b0(e, e)_i with R0 the mean matrix of the raw tensor.
    """
    if spec.family is not Family.RANDOM_MBT:
        raise QveInputError("critical_lambda is defined for the random_mbt family")
    b0 = _raw_tensor(spec.n, spec.seed)
    mean = b0.sum(axis=2) + b0.sum(axis=1)
    return spectral_radius(mean) - float(np.max(b0.sum(axis=(1, 2))))


def generate_random_mbt(spec: GeneratorSpec) -> QveProblem:
    """Uniform raw tensor rescaled so that a + b(e, e) = e; larger lambda means more deaths."""
    if spec.family is not Family.RANDOM_MBT:
        raise QveInputError(f"generate_random_mbt got family {spec.family.value}")
    a, b = _rescale(_raw_tensor(spec.n, spec.seed), spec.lam)
    return QveProblem(np.maximum(a, 0.0), BilinearTensor(b))


def generate_scalar(spec: GeneratorSpec) -> QveProblem:
    """x = lambda + (1 - lambda) x^2; minimal solution min(1, lambda / (1 - lambda))."""
    if spec.family is not Family.SCALAR:
        raise QveInputError(f"generate_scalar got family {spec.family.value}")
    if not 0 < spec.lam < 1:
        raise QveInputError(f"scalar family needs 0 < lambda < 1, got {spec.lam}")
    return QveProblem([spec.lam], BilinearTensor([[[1.0 - spec.lam]]]))


def generate_block_triangular(spec: GeneratorSpec) -> QveProblem:
    """
    Head indices are the first floor(n/2), tail the last ceil(n/2). Tail rows
    only reach tail states and follow the random_mbt recipe with the given
    lambda; head rows reach every state, with small positive weights on the
    pairs that involve the tail.
    """
    if spec.family is not Family.BLOCK_TRIANGULAR:
        raise QveInputError(f"generate_block_triangular got family {spec.family.value}")
    n = spec.n
    if n < 2:
        raise QveInputError("block_triangular family needs n >= 2")
    m = n // 2
    raw = _raw_tensor(n, spec.seed)

    a = np.zeros(n)
    coeffs = np.zeros((n, n, n))
    a[m:], coeffs[m:, m:, m:] = _rescale(raw[m:, m:, m:], spec.lam)

    head = BLOCK_COUPLING_WEIGHT * (1.0 - raw[:m])
    head[:, :m, :m] = raw[:m, :m, :m]
    a[:m], coeffs[:m] = _rescale(head, BLOCK_HEAD_INFLATION)
    logger.debug(f"block_triangular n={n}: head {m}, tail {n - m}")
    return QveProblem(np.maximum(a, 0.0), BilinearTensor(coeffs))


_GENERATORS = {
    Family.RANDOM_MBT: generate_random_mbt,
    Family.SCALAR: generate_scalar,
    Family.BLOCK_TRIANGULAR: generate_block_triangular,
}


def generate(spec: GeneratorSpec) -> QveProblem:
    problem = _GENERATORS[spec.family](spec)
    defect = float(np.max(np.abs(problem.a + eval_bilinear(problem.b, np.ones(problem.n), np.ones(problem.n)) - 1.0)))
    logger.debug(f"Generated {spec.family.value} n={spec.n} lambda={spec.lam!r} seed={spec.seed} (defect {defect:.1e})")
    return problem
