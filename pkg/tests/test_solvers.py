"""
Tests for the solver registry, the automatic pipeline and the bench grid.
"""
import io

import numpy as np
import pytest

from conftest import random_problem, scalar_problem, scalar_solution
from src.models.bench import BENCH_HEADER, BenchGrid, read_rows, run_cell, run_grid, write_rows
from src.models.classical import SolverConfig, newton_solve
from src.models.errors import QveInputError
from src.models.instances import build_spec, critical_lambda, generate
from src.models.linalg import MmatrixClass
from src.models.problem import VariantKind
from src.models.solvers import SOLVERS, auto_solve, get_solver, solve
from src.models.structure import Criticality, certify_minimal, classify


@pytest.mark.parametrize('name', sorted(SOLVERS))
@pytest.mark.parametrize('a', [0.1, 0.25, 0.4, 0.5, 0.6])
def test_every_solver_on_scalar_family(name, a):
    report = solve(name, scalar_problem(a))
    assert report.converged
    assert report.solution[0] == pytest.approx(scalar_solution(a), abs=1e-10)


@pytest.mark.parametrize('seed', range(10))
@pytest.mark.parametrize('fraction', [0.5, 0.99])
def test_cross_solver_agreement(seed, fraction):
    p = random_problem(20, seed, fraction)
    reference = newton_solve(p).solution
    for name in ('depth', 'order', 'thicknesses', 'perron', 'perron-newton', 'auto'):
        report = solve(name, p)
        assert report.converged, name
        np.testing.assert_allclose(report.solution, reference, atol=1e-8, err_msg=name)
        assert report.minimality.classification is not MmatrixClass.NOT_M
        assert report.residual <= 1e-11


@pytest.mark.parametrize('seed', range(5))
def test_auto_on_reducible_instances(seed):
    p = generate(build_spec(family='block_triangular', n=6, lam=1.0, seed=seed))
    report = auto_solve(p)
    assert report.converged
    np.testing.assert_allclose(report.solution, newton_solve(p).solution, atol=1e-10)
    assert certify_minimal(p, report.solution).is_m_matrix


def test_auto_with_subcritical_tail():
    p = generate(build_spec(family='block_triangular', n=6, lam=50.0, seed=0))
    report = auto_solve(p, SolverConfig(variant=VariantKind.SYMMETRIZE))
    np.testing.assert_allclose(report.solution[3:], 1.0, atol=1e-10)
    assert np.all(report.solution[:3] < 1.0)
    np.testing.assert_allclose(report.solution, newton_solve(p).solution, atol=1e-10)


def near_critical_problem(gap: float):
    """random_mbt n=6 seed 0 rescaled so that rho(R) = 1 + gap."""
    spec = build_spec(family='random_mbt', n=6, lam=0.0, seed=0)
    lam_crit = critical_lambda(spec)
    rho_at_zero = classify(generate(spec)).rho_R
    max_row = lam_crit / (rho_at_zero - 1.0)
    return generate(spec.with_lambda(max_row * rho_at_zero / (1.0 + gap) - max_row))


@pytest.mark.parametrize('name', ['depth', 'newton', 'perron', 'perron-newton', 'auto'])
def test_supercritical_edge_of_critical_band_is_certified_singular(name):
    p = near_critical_problem(8e-10)
    structure = classify(p)
    assert structure.criticality is Criticality.CRITICAL
    assert structure.rho_R > 1.0
    report = solve(name, p)
    assert report.converged
    np.testing.assert_array_equal(report.solution, np.ones(6))
    assert report.minimality.classification is MmatrixClass.SINGULAR
    assert certify_minimal(p, report.solution).classification is MmatrixClass.SINGULAR


def test_unknown_solver():
    with pytest.raises(QveInputError):
        get_solver('bisection')


def test_bench_grid_rows_in_order():
    grid = BenchGrid(n=8, seeds=[0, 1], lambda_fracs=[0.5, 0.9], solvers=['newton', 'perron'],
                     variants=['original', 'symmetrize'], omit_timing=True)
    rows = run_grid(grid)
    assert len(rows) == 16
    assert [(r.seed, r.lambda_frac, r.solver, r.variant) for r in rows[:4]] == [
        (0, 0.5, 'newton', 'original'),
        (0, 0.5, 'newton', 'symmetrize'),
        (0, 0.5, 'perron', 'original'),
        (0, 0.5, 'perron', 'symmetrize'),
    ]
    assert all(r.status == 'converged' and r.wall_time == 0.0 for r in rows)


def test_bench_csv_parses_back():
    grid = BenchGrid(n=6, lambda_fracs=[0.5], solvers=['newton'], omit_timing=True)
    rows = run_grid(grid)
    buffer = io.StringIO()
    write_rows(rows, buffer)
    text = buffer.getvalue()
    assert text.splitlines()[0] == ','.join(BENCH_HEADER)
    assert read_rows(io.StringIO(text)) == rows


def test_newton_slower_near_criticality():
    grid = BenchGrid(n=20, seeds=[0], lambda_fracs=[0.5, 0.999], solvers=['newton', 'perron'], omit_timing=True)
    rows = {(r.solver, r.lambda_frac): r for r in run_grid(grid)}
    assert rows['newton', 0.999].iterations > rows['newton', 0.5].iterations
    assert rows['perron', 0.999].iterations <= rows['perron', 0.5].iterations + 1


def test_bench_cell_failure_is_recorded():
    grid = BenchGrid(n=6, lambda_fracs=[0.9], solvers=['depth'], max_iters=1, omit_timing=True)
    row = run_cell(grid, grid.cells()[0])
    assert row.status == 'max_iters'
    assert row.iterations == 1


def test_bench_grid_validation():
    with pytest.raises(ValueError):
        BenchGrid(solvers=[])
    with pytest.raises(ValueError):
        BenchGrid(solvers=['bisection'])
    with pytest.raises(ValueError):
        BenchGrid(solvers=['newton'], family='scalar')
