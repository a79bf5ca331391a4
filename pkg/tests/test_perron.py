"""
Tests for the Perron iteration, its Jacobian and the Perron-Newton method.
"""
import numpy as np
import pytest

from conftest import random_problem, scalar_problem, scalar_solution
from src.models.classical import SolverConfig, newton_solve
from src.models.errors import NormalizationError, QveInputError, ReducibleInputError
from src.models.instances import build_spec, generate
from src.models.linalg import MmatrixClass, perron_left, perron_right
from src.models.perron import (
    normalize_perron,
    perron_iteration_step,
    perron_jacobian,
    perron_newton_solve,
    perron_solve,
    survival_matrix,
)
from src.models.problem import BilinearTensor, QveProblem, VariantKind, eval_bilinear, mean_matrix
from src.models.structure import certify_minimal

PERRON = [perron_solve, perron_newton_solve]


def _w(p):
    return perron_left(mean_matrix(p)).vector


@pytest.mark.parametrize('solve', PERRON)
@pytest.mark.parametrize('a', [0.1, 0.25, 0.4])
def test_scalar_supercritical(solve, a):
    report = solve(scalar_problem(a))
    assert report.converged
    assert report.solution[0] == pytest.approx(scalar_solution(a), abs=1e-10)


def test_perron_scalar_step_count():
    report = perron_solve(scalar_problem(0.25))
    assert report.iterations <= 2
    assert report.eigenvalue_history[0] == pytest.approx(0.75)


@pytest.mark.parametrize('solve', PERRON)
@pytest.mark.parametrize('a', [0.5, 0.6])
def test_non_supercritical_gives_e(solve, a):
    report = solve(scalar_problem(a))
    assert report.converged
    assert report.solution[0] == 1.0


def test_critical_minimality_is_singular():
    report = perron_solve(scalar_problem(0.5))
    assert report.minimality.classification is MmatrixClass.SINGULAR


@pytest.mark.parametrize('solve', PERRON)
def test_agrees_with_newton_on_random_instance(solve, random20):
    report = solve(random20)
    assert report.converged
    np.testing.assert_allclose(report.solution, newton_solve(random20).solution, atol=1e-8)


@pytest.mark.parametrize('solve', PERRON)
@pytest.mark.parametrize('fraction', [0.5, 0.99])
def test_limit_properties(solve, fraction):
    p = random_problem(10, 5, fraction)
    report = solve(p)
    assert report.converged
    y = 1.0 - report.solution
    assert np.all(y >= 0) and np.all(y <= 1)
    assert perron_right(survival_matrix(p, y)).value == pytest.approx(1.0, abs=1e-8)
    w = _w(p)
    ones = np.ones(p.n)
    orthogonal = w @ (y - eval_bilinear(p.b, y, ones) - eval_bilinear(p.b, ones, y) + eval_bilinear(p.b, y, y))
    assert abs(orthogonal) <= 1e-12 * np.abs(w).sum()
    assert certify_minimal(p, report.solution).classification is MmatrixClass.NONSINGULAR


def test_normalization_is_orthogonal(two_state_problem):
    w = _w(two_state_problem)
    y = normalize_perron(two_state_problem, w, [0.3, 0.7])
    ones = np.ones(2)
    p = two_state_problem
    defect = y - eval_bilinear(p.b, y, ones) - eval_bilinear(p.b, ones, y) + eval_bilinear(p.b, y, y)
    assert abs(w @ defect) <= 1e-14


def test_normalization_fails_when_not_supercritical():
    p = scalar_problem(0.6)
    with pytest.raises(NormalizationError):
        normalize_perron(p, [1.0], [1.0])


def test_iteration_step_reports_eigenvalue(two_state_problem):
    w = _w(two_state_problem)
    trace = perron_iteration_step(two_state_problem, w, np.ones(2))
    h = survival_matrix(two_state_problem, np.ones(2))
    assert trace.eigenvalue == pytest.approx(perron_right(h).value, abs=1e-12)
    assert np.all(trace.y_next > 0)


def _perron_map(p, w, y):
    return perron_iteration_step(p, w, y).y_next


@pytest.mark.parametrize('seed', range(5))
def test_jacobian_matches_finite_differences(seed):
    p = random_problem(5, seed, 0.5)
    w = _w(p)
    y_star = 1.0 - newton_solve(p).solution
    h = 1e-6
    for t in (0.3, 0.6, 0.9):
        y = t * y_star + (1 - t) * np.full(5, 0.5)
        numeric = np.column_stack([
            (_perron_map(p, w, y + h * e) - _perron_map(p, w, y - h * e)) / (2 * h) for e in np.eye(5)
        ])
        np.testing.assert_allclose(perron_jacobian(p, w, y), numeric, atol=1e-5)


def test_perron_newton_not_slower_near_criticality():
    p = random_problem(20, 0, 0.999)
    perron = perron_solve(p)
    newton = perron_newton_solve(p)
    assert perron.converged and newton.converged
    assert newton.iterations <= perron.iterations


def test_perron_fast_near_criticality():
    far = perron_solve(random_problem(20, 0, 0.5))
    near = perron_solve(random_problem(20, 0, 0.999))
    assert near.iterations <= far.iterations + 1


@pytest.mark.parametrize('kind', list(VariantKind))
def test_variants_agree(kind):
    p = random_problem(8, 1, 0.9)
    reference = perron_newton_solve(p).solution
    report = perron_solve(p, SolverConfig(variant=kind))
    assert report.variant == kind.value
    np.testing.assert_allclose(report.solution, reference, atol=1e-10)


def test_reducible_input_rejected():
    p = generate(build_spec(family='block_triangular', n=6, lam=1.0, seed=0))
    with pytest.raises(ReducibleInputError):
        perron_solve(p)
    with pytest.raises(ReducibleInputError):
        perron_newton_solve(p)


def test_substochastic_input_rejected():
    p = QveProblem.relaxed([0.2], BilinearTensor([[[0.5]]]))
    with pytest.raises(QveInputError):
        perron_solve(p)
