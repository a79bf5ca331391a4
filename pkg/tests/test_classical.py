"""
Tests for the depth, order, thicknesses and Newton iterations.
"""
import numpy as np
import pytest

from conftest import random_problem, scalar_problem, scalar_solution
from src.models.classical import (
    SolverConfig,
    SolverStatus,
    certify,
    depth_solve,
    newton_solve,
    order_solve,
    thicknesses_solve,
)
from src.models.linalg import MmatrixClass
from src.models.problem import VariantKind

CLASSICAL = [depth_solve, order_solve, thicknesses_solve, newton_solve]


@pytest.mark.parametrize('solve', CLASSICAL)
@pytest.mark.parametrize('a', [0.1, 0.25, 0.4])
def test_scalar_supercritical(solve, a):
    report = solve(scalar_problem(a))
    assert report.status is SolverStatus.CONVERGED
    assert report.solution[0] == pytest.approx(scalar_solution(a), abs=1e-10)
    assert report.minimality.classification is MmatrixClass.NONSINGULAR


@pytest.mark.parametrize('solve', CLASSICAL)
def test_scalar_critical_returns_e(solve):
    report = solve(scalar_problem(0.5))
    assert report.converged
    assert report.solution[0] == 1.0
    assert report.iterations == 0


@pytest.mark.parametrize('solve', CLASSICAL)
def test_scalar_subcritical(solve):
    report = solve(scalar_problem(0.6))
    assert report.converged
    assert report.solution[0] == pytest.approx(1.0, abs=1e-10)


def test_newton_converges_quadratically(random20):
    report = newton_solve(random20)
    assert report.converged
    assert report.iterations < 15
    assert report.residual <= 1e-11


@pytest.mark.parametrize('solve', CLASSICAL)
@pytest.mark.parametrize('seed, fraction', [(1, 0.5), (2, 0.9), (5, 1.5)])
def test_monotone_iterates_from_zero(solve, seed, fraction):
    p = random_problem(6, seed, fraction)
    report = solve(p, SolverConfig(record_iterates=True))
    assert report.converged
    steps = np.array(report.iterates)
    np.testing.assert_array_equal(steps[0], 0.0)
    assert np.all(np.diff(steps, axis=0) >= -1e-13)
    assert np.all(steps <= report.solution + 1e-10)
    assert np.all(steps <= 1.0 + 1e-12)


@pytest.mark.parametrize('seed', range(4))
@pytest.mark.parametrize('fraction', [0.3, 0.5, 0.9, 0.99])
def test_newton_needs_no_more_steps_than_depth(seed, fraction):
    p = random_problem(8, seed, fraction)
    newton = newton_solve(p)
    depth = depth_solve(p)
    assert newton.converged and depth.converged
    assert newton.iterations <= depth.iterations


def test_max_iters_status():
    report = depth_solve(random_problem(6, 0, 0.9), SolverConfig(max_iters=2))
    assert report.status is SolverStatus.MAX_ITERS
    assert report.iterations == 2


def test_solvers_agree_on_random_instance():
    p = random_problem(8, 3, 0.9)
    solutions = [solve(p).solution for solve in CLASSICAL]
    for other in solutions[1:]:
        np.testing.assert_allclose(other, solutions[0], atol=1e-8)


def test_newton_iterates_identical_across_variants():
    p = random_problem(6, 2, 0.5)
    reference = newton_solve(p, SolverConfig(record_iterates=True)).iterates
    for kind in VariantKind:
        iterates = newton_solve(p, SolverConfig(variant=kind, record_iterates=True)).iterates
        assert len(iterates) == len(reference)
        for mine, theirs in zip(iterates, reference):
            np.testing.assert_allclose(mine, theirs, atol=1e-14)


def test_depth_on_transpose_is_order():
    p = random_problem(6, 4, 0.5)
    depth = depth_solve(p, SolverConfig(variant=VariantKind.TRANSPOSE, record_iterates=True))
    order = order_solve(p, SolverConfig(record_iterates=True))
    assert depth.iterations == order.iterations
    for mine, theirs in zip(depth.iterates, order.iterates):
        np.testing.assert_allclose(mine, theirs, atol=1e-14)


def test_solver_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iters=0)


def test_certify_separates_the_two_fixed_points():
    p = scalar_problem(0.25)
    assert certify(p, np.array([1.0 / 3.0])).classification == MmatrixClass.NONSINGULAR
    assert certify(p, np.array([1.0])).classification == MmatrixClass.NOT_M
