"""
Benchmark grid over solvers, bilinear-form variants and distances to criticality.
Each cell generates a random MBT at a fraction of its critical lambda and
records iterations, final residual, wall time and status as one CSV row.
"""
import csv
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, List, Optional, TextIO, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..utils.config import SOLVER_NAMES
from .classical import SolverConfig
from .errors import NoConvergenceError, NumericError, QveError, QveInputError, StructureError
from .instances import Family, build_spec, critical_lambda, generate
from .problem import VariantKind
from .solvers import solve

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BenchRow:
    solver: str
    variant: str
    lambda_frac: float
    n: int
    seed: int
    iterations: int
    residual: float
    wall_time: float
    status: str


BENCH_HEADER = [f.name for f in fields(BenchRow)]


class BenchGrid(BaseModel):
    """Cartesian product seeds x lambda fractions x solvers x variants."""
    model_config = ConfigDict(frozen=True)

    family: Family = Family.RANDOM_MBT
    n: int = Field(20, ge=1)
    seeds: List[int] = Field(default_factory=lambda: [0])
    lambda_fracs: List[float] = Field(default_factory=lambda: [0.5, 0.9, 0.99, 0.999])
    solvers: List[str] = Field(min_length=1)
    variants: List[VariantKind] = Field(default_factory=lambda: [VariantKind.ORIGINAL])
    tol: Optional[float] = Field(None, gt=0)
    max_iters: Optional[int] = Field(None, ge=1)
    omit_timing: bool = False

    @field_validator('family')
    @classmethod
    def _random_only(cls, family: Family) -> Family:
        if family is not Family.RANDOM_MBT:
            raise ValueError("lambda fractions are defined for the random_mbt family only")
        return family

    @field_validator('solvers')
    @classmethod
    def _known_solvers(cls, solvers: List[str]) -> List[str]:
        unknown = [name for name in solvers if name not in SOLVER_NAMES]
        if unknown:
            raise ValueError(f"unknown solver(s): {', '.join(unknown)}")
        return solvers

    def cells(self) -> List[Tuple[int, float, str, VariantKind]]:
        return [(seed, frac, solver, variant)
                for seed in self.seeds
                for frac in self.lambda_fracs
                for solver in self.solvers
                for variant in self.variants]


def _failure_status(error: QveError) -> str:
    if isinstance(error, QveInputError):
        return 'input_error'
    if isinstance(error, StructureError):
        return 'structure_error'
    if isinstance(error, NoConvergenceError):
        return 'no_convergence'
    if isinstance(error, NumericError):
        return 'numeric_failure'
    return 'error'


def run_cell(grid: BenchGrid, cell: Tuple[int, float, str, VariantKind]) -> BenchRow:
    """One solve; failures end up in the row's status instead of propagating."""
    seed, frac, solver, variant = cell
    iterations, residual, status = 0, float('nan'), 'error'
    started = time.perf_counter()
    try:
        spec = build_spec(family=grid.family, n=grid.n, lam=0.0, seed=seed)
        lam = frac * critical_lambda(spec)
        if lam < 0:
            raise QveInputError(f"lambda_crit is negative for seed {seed}; no supercritical range")
        problem = generate(spec.with_lambda(lam))
        options = {'variant': variant}
        if grid.tol is not None:
            options['tol'] = grid.tol
        if grid.max_iters is not None:
            options['max_iters'] = grid.max_iters
        report = solve(solver, problem, SolverConfig(**options))
        iterations, residual, status = report.iterations, report.residual, report.status.value
    except QveError as e:
        logger.warning(f"bench cell seed={seed} frac={frac} {solver}/{variant.value}: {e}")
        status = _failure_status(e)
    elapsed = 0.0 if grid.omit_timing else time.perf_counter() - started
    return BenchRow(
        solver=solver,
        variant=VariantKind(variant).value,
        lambda_frac=frac,
        n=grid.n,
        seed=seed,
        iterations=iterations,
        residual=float(residual),
        wall_time=elapsed,
        status=status,
    )


def _run_indexed(args) -> BenchRow:
    grid, cell = args
    return run_cell(grid, cell)


def run_grid(grid: BenchGrid, jobs: int = 1) -> List[BenchRow]:
    """All cells in grid order, optionally spread over `jobs` processes."""
    cells = grid.cells()
    logger.info(f"Running {len(cells)} bench cells with {jobs} job(s)")
    if jobs <= 1:
        return [run_cell(grid, cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_indexed, [(grid, cell) for cell in cells]))


def write_rows(rows: Iterable[BenchRow], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator='\n')
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow(astuple(row))


def read_rows(stream: TextIO) -> List[BenchRow]:
    reader = csv.DictReader(stream)
    if reader.fieldnames != BENCH_HEADER:
        raise QveInputError(f"Unexpected bench header {reader.fieldnames}")
    return [
        BenchRow(
            solver=record['solver'],
            variant=record['variant'],
            lambda_frac=float(record['lambda_frac']),
            n=int(record['n']),
            seed=int(record['seed']),
            iterations=int(record['iterations']),
            residual=float(record['residual']),
            wall_time=float(record['wall_time']),
            status=record['status'],
        )
        for record in reader
    ]
