"""
Monte Carlo estimate of extinction probabilities by direct simulation of the
branching process. Independent of every solver; used to validate them.
"""
import logging
import math
from typing import List, Tuple

import numpy as np
from numba import jit, prange
from pydantic import BaseModel, ConfigDict, Field

from ..utils.config import MC_DEFAULT_MAX_POPULATION, MC_DEFAULT_TRIALS, MC_TRUNCATION_ALLOWANCE
from .errors import QveInputError
from .instances import MASK64, SPLITMIX_GAMMA, mix64_array
from .problem import QveProblem

logger = logging.getLogger(__name__)

_GAMMA = np.uint64(SPLITMIX_GAMMA)
_MUL1 = np.uint64(0xBF58476D1CE4E5B9)
_MUL2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_UNIT = 1.0 / 9007199254740992.0
_TRIAL_CHUNK = 256


class McConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    trials: int = Field(MC_DEFAULT_TRIALS, ge=1)
    max_population: int = Field(MC_DEFAULT_MAX_POPULATION, ge=1)
    seed: int = Field(0, ge=0, le=MASK64)
    start_state: int = Field(0, ge=0)


@jit(nopython=True, nogil=True, cache=True)
def _run_trial(cdf, n, n_outcomes, start, state, max_population, current, upcoming):
    """1 if the population started from `start` dies out, 0 once it outgrows the cap."""
    current[0] = start
    size = 1
    while size > 0:
        produced = 0
        for idx in range(size):
            state = state + _GAMMA
            z = state
            z = (z ^ (z >> _S30)) * _MUL1
            z = (z ^ (z >> _S27)) * _MUL2
            z = z ^ (z >> _S31)
            u = float(z >> _S11) * _UNIT

            # first outcome whose cumulative probability exceeds u
            row = current[idx] * n_outcomes
            lo = 0
            hi = n_outcomes
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[row + mid] <= u:
                    lo = mid + 1
                else:
                    hi = mid
            outcome = min(lo, n_outcomes - 1)
            if outcome == 0:
                continue
            pair = outcome - 1
            upcoming[produced] = pair // n
            upcoming[produced + 1] = pair % n
            produced += 2
            # live population: children so far plus parents still waiting
            if produced + size - idx - 1 > max_population:
                return 0
        current, upcoming = upcoming, current
        size = produced
    return 1


@jit(nopython=True, parallel=True, cache=True)
def _count_extinct(cdf, n, start, trial_seeds, max_population):
    n_outcomes = cdf.shape[0] // n
    trials = trial_seeds.shape[0]
    n_chunks = (trials + _TRIAL_CHUNK - 1) // _TRIAL_CHUNK
    counts = np.zeros(n_chunks, dtype=np.int64)
    for c in prange(n_chunks):
        current = np.empty(max_population + 2, dtype=np.int64)
        upcoming = np.empty(max_population + 2, dtype=np.int64)
        extinct = 0
        for t in range(c * _TRIAL_CHUNK, min(trials, (c + 1) * _TRIAL_CHUNK)):
            extinct += _run_trial(cdf, n, n_outcomes, start, trial_seeds[t], max_population, current, upcoming)
        counts[c] = extinct
    return counts.sum()


def _outcome_cdf(p: QveProblem) -> np.ndarray:
    """Row i: cumulative probabilities of death, then of each (j, k) offspring pair."""
    weights = np.concatenate([p.a[:, None], p.b.coeffs.reshape(p.n, p.n * p.n)], axis=1)
    return np.cumsum(weights, axis=1)


def _trial_seeds(seed: int, trials: int) -> np.ndarray:
    with np.errstate(over='ignore'):
        offsets = np.uint64(seed) + np.arange(trials, dtype=np.uint64)
    return mix64_array(offsets)


def estimate_extinction(p: QveProblem, cfg: McConfig) -> Tuple[float, float]:
    """
    Fraction of simulated populations started from one individual in
    `cfg.start_state` that die out, with its binomial standard error.
    A trial counts as surviving once its live population (children drawn so
    far plus parents still waiting) exceeds `cfg.max_population`. Trials run
    in parallel chunks; the count does not depend on scheduling.
    """
    if cfg.start_state >= p.n:
        raise QveInputError(f"start_state {cfg.start_state} out of range for n={p.n}")
    extinct = int(_count_extinct(_outcome_cdf(p).ravel(), p.n, cfg.start_state,
                                 _trial_seeds(cfg.seed, cfg.trials), cfg.max_population))
    estimate = extinct / cfg.trials
    stderr = math.sqrt(estimate * (1.0 - estimate) / cfg.trials)
    logger.debug(f"MC state {cfg.start_state}: {extinct}/{cfg.trials} extinct")
    return estimate, stderr


def estimate_all_states(p: QveProblem, cfg: McConfig) -> List[Tuple[float, float]]:
    """estimate_extinction for every start state, each with the same trial seeds."""
    return [estimate_extinction(p, cfg.model_copy(update={'start_state': i})) for i in range(p.n)]


def within_band(solution: float, estimate: float, stderr: float, trials: int,
                allowance: float = MC_TRUNCATION_ALLOWANCE) -> bool:
    """
    |estimate - solution| <= 3 stderr + allowance. An all-or-nothing outcome has
    zero binomial stderr, so it is widened to the worst case 0.5 / sqrt(trials).
    """
    if estimate in (0.0, 1.0):
        stderr = max(stderr, 0.5 / math.sqrt(trials))
    return abs(estimate - solution) <= 3.0 * stderr + allowance
