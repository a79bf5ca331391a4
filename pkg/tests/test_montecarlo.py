"""
Tests for the Monte Carlo extinction estimator.
"""
import time

import numpy as np
import pytest

from conftest import random_problem, scalar_problem
from src.models.errors import QveInputError
from src.models.montecarlo import McConfig, estimate_all_states, estimate_extinction, within_band
from src.models.problem import BilinearTensor, QveProblem
from src.models.solvers import auto_solve

FAST = McConfig(trials=20000, max_population=1000, seed=1)


def test_scalar_estimate_within_band():
    estimate, stderr = estimate_extinction(scalar_problem(0.25), FAST)
    assert 0.0 < stderr < 0.01
    assert within_band(1.0 / 3.0, estimate, stderr, FAST.trials)


def test_certain_death():
    p = QveProblem([1.0, 1.0], BilinearTensor(np.zeros((2, 2, 2))))
    for estimate, stderr in estimate_all_states(p, McConfig(trials=500)):
        assert estimate == 1.0
        assert stderr == 0.0


def test_subcritical_dies_out():
    estimate, _ = estimate_extinction(scalar_problem(0.6), FAST)
    assert estimate >= 0.99


def test_deterministic_for_fixed_seed():
    p = scalar_problem(0.3)
    cfg = McConfig(trials=2000, max_population=200, seed=42)
    assert estimate_extinction(p, cfg) == estimate_extinction(p, cfg)


def test_raising_the_cutoff_only_adds_extinctions():
    p = scalar_problem(0.4)
    low = estimate_extinction(p, McConfig(trials=5000, max_population=5, seed=3))[0]
    high = estimate_extinction(p, McConfig(trials=5000, max_population=500, seed=3))[0]
    assert low <= high


def test_random_instance_agrees_with_solver():
    p = random_problem(5, 0, 0.5)
    solution = auto_solve(p).solution
    for x, (estimate, stderr) in zip(solution, estimate_all_states(p, FAST)):
        assert within_band(float(x), estimate, stderr, FAST.trials)


def test_start_state_out_of_range():
    with pytest.raises(QveInputError):
        estimate_extinction(scalar_problem(0.25), McConfig(start_state=1, trials=10))


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(trials=0)
    with pytest.raises(ValueError):
        McConfig(max_population=0)


def test_single_trial_band_is_wide():
    assert within_band(1.0 / 3.0, 0.0, 0.0, 1)
    assert not within_band(1.0 / 3.0, 0.0, 0.0, 10 ** 6)


def test_full_size_run_agrees_and_finishes_within_a_minute():
    cfg = McConfig(trials=100000, max_population=10000, seed=0)
    estimate_extinction(scalar_problem(0.25), McConfig(trials=10, max_population=10))  # compile
    problems = [scalar_problem(0.25), random_problem(5, 0, 0.5)]
    started = time.perf_counter()
    for p in problems:
        solution = auto_solve(p).solution
        for x, (estimate, stderr) in zip(solution, estimate_all_states(p, cfg)):
            assert within_band(float(x), estimate, stderr, cfg.trials)
    assert time.perf_counter() - started < 60.0


def test_cutoff_counts_live_population_mid_generation():
    # a single individual that always splits outgrows a cap of one immediately
    p = QveProblem([0.0], BilinearTensor([[[1.0]]]))
    assert estimate_extinction(p, McConfig(trials=50, max_population=1))[0] == 0.0


def test_trials_spanning_several_chunks_are_deterministic():
    p = scalar_problem(0.3)
    cfg = McConfig(trials=1000, max_population=100, seed=7)
    first = estimate_extinction(p, cfg)
    assert estimate_extinction(p, cfg) == first
    assert 0.0 < first[0] < 1.0
