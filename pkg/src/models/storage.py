"""
Problem and report files.
Both are JSON documents validated with pydantic; floats are written with
their shortest round-trip representation, so save then load is exact.
"""
import json
import logging
import math
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..utils.config import STOCHASTIC_TOL
from .classical import SolverReport
from .errors import QveInputError
from .problem import BilinearTensor, QveProblem, deduce_death_vector

logger = logging.getLogger(__name__)


class ProblemDocument(BaseModel):
    """On-disk problem: dimension, optional death vector, sparse tensor entries."""
    n: int = Field(ge=1)
    a: Optional[List[float]] = None
    b: List[Tuple[int, int, int, float]] = Field(default_factory=list)
    meta: Dict[str, Any] = Field(default_factory=dict)


class ReportDocument(BaseModel):
    """On-disk solver report; mirrors SolverReport."""
    solver: str
    variant: str
    status: str
    iterations: int = Field(ge=0)
    solution: List[Optional[float]]
    # null where the value is inf or nan, which JSON cannot hold
    residual: Optional[float] = None
    residual_history: List[Optional[float]] = Field(default_factory=list)
    eigenvalue_history: List[Optional[float]] = Field(default_factory=list)
    minimality: Optional[str] = None
    meta: Dict[str, Any] = Field(default_factory=dict)


def _read_json(path: str) -> Any:
    try:
        with open(path, 'r') as f:
            return json.load(f)
    except FileNotFoundError as e:
        raise QveInputError(f"No such file: {path}") from e
    except json.JSONDecodeError as e:
        raise QveInputError(f"{path} is not valid JSON: {e}") from e


def _write_json(path: str, data: Dict) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(data, f, indent=2, allow_nan=False)
        f.write('\n')


def _finite_or_none(value) -> Optional[float]:
    value = float(value)
    return value if math.isfinite(value) else None


def problem_to_document(p: QveProblem, meta: Optional[Dict[str, Any]] = None) -> ProblemDocument:
    return ProblemDocument(
        n=p.n,
        a=[float(v) for v in p.a],
        b=[tuple(entry) for entry in p.b.to_triples()],
        meta=meta or {},
    )


def problem_from_document(doc: ProblemDocument, renormalize: bool = False) -> QveProblem:
    b = BilinearTensor.from_triples(doc.n, doc.b)
    if doc.a is not None:
        a = np.asarray(doc.a, dtype=np.float64)
    else:
        # rows with b(e, e) > e get a = 0 here and are rescaled below
        a = deduce_death_vector(b, stochastic_tol=np.inf if renormalize else STOCHASTIC_TOL)
    if renormalize:
        problem, _ = QveProblem.renormalized(a, b)
        return problem
    return QveProblem(a, b)


def load_problem(path: str, renormalize: bool = False) -> QveProblem:
    """
    Read a problem file.

    Raises:
        QveInputError: unreadable file, schema violation, bad index or
            coefficient, or a + b(e, e) != e without `renormalize`
    """
    try:
        doc = ProblemDocument.model_validate(_read_json(path))
    except ValidationError as e:
        raise QveInputError(f"{path}: {e.error_count()} schema error(s); first: {e.errors()[0]['msg']}") from e
    problem = problem_from_document(doc, renormalize)
    logger.debug(f"Loaded problem n={problem.n} from {path}")
    return problem


def save_problem(path: str, p: QveProblem, meta: Optional[Dict[str, Any]] = None) -> None:
    _write_json(path, problem_to_document(p, meta).model_dump())
    logger.debug(f"Saved problem n={p.n} to {path}")


def report_to_document(report: SolverReport, meta: Optional[Dict[str, Any]] = None) -> ReportDocument:
    return ReportDocument(
        solver=report.solver,
        variant=report.variant,
        status=report.status.value,
        iterations=report.iterations,
        solution=[_finite_or_none(v) for v in report.solution],
        residual=_finite_or_none(report.residual),
        residual_history=[_finite_or_none(v) for v in report.residual_history],
        eigenvalue_history=[_finite_or_none(v) for v in report.eigenvalue_history],
        minimality=report.minimality.classification.value if report.minimality else None,
        meta=meta or {},
    )


def save_report(path: str, report: SolverReport, meta: Optional[Dict[str, Any]] = None) -> None:
    _write_json(path, report_to_document(report, meta).model_dump())


def load_report(path: str) -> ReportDocument:
    try:
        return ReportDocument.model_validate(_read_json(path))
    except ValidationError as e:
        raise QveInputError(f"{path}: not a solver report ({e.errors()[0]['msg']})") from e
