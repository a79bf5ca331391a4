"""
Shared fixtures for the test suite.
"""
import os

# keep test runs from writing log files into the working tree
os.environ.setdefault('QVE_LOG_TO_FILE', '0')

import numpy as np
import pytest

from src.models.instances import build_spec, critical_lambda, generate
from src.models.problem import BilinearTensor, QveProblem


def scalar_problem(a: float) -> QveProblem:
    return QveProblem([a], BilinearTensor([[[1.0 - a]]]))


def scalar_solution(a: float) -> float:
    return min(1.0, a / (1.0 - a))


def random_problem(n: int, seed: int, fraction: float) -> QveProblem:
    spec = build_spec(family='random_mbt', n=n, lam=0.0, seed=seed)
    return generate(spec.with_lambda(fraction * critical_lambda(spec)))


@pytest.fixture
def two_state_problem() -> QveProblem:
    """Supercritical two-type MBT with every coefficient positive."""
    coeffs = np.array([
        [[0.2, 0.1], [0.15, 0.15]],
        [[0.1, 0.2], [0.1, 0.25]],
    ])
    a = 1.0 - coeffs.sum(axis=(1, 2))
    return QveProblem(a, BilinearTensor(coeffs))


@pytest.fixture
def random20() -> QveProblem:
    return random_problem(20, 0, 0.5)
