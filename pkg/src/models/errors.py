"""
Exception hierarchy for the MBT extinction solver.
"""


class QveError(Exception):
    """Base class for every error raised by the solver package."""


class QveInputError(QveError, ValueError):
    """Malformed problem, file, argument or configuration."""


class NumericError(QveError, ArithmeticError):
    """A numerical kernel could not produce a trustworthy result."""


class SingularSystemError(NumericError):
    """Linear system with a pivot below the singularity threshold."""


class EigenConvergenceError(NumericError):
    """Power iteration did not converge, even after the shifted fallback."""


class IrreducibilityError(NumericError):
    """Dominant eigenvector has a non-positive entry; the input is reducible."""


class NormalizationError(NumericError):
    """The residual-orthogonal scaling of a Perron vector is undefined."""


class DegenerateProjectionError(NumericError):
    """A rank-one projector in the Perron-Newton Jacobian has a vanishing denominator."""


class StructureError(QveError):
    """The problem structure does not support the requested operation."""


class NoConvergenceError(QveError):
    """An iteration settled outside the admissible box 0 <= y <= e."""


class ReducibleInputError(StructureError):
    """A Perron solver was handed a problem whose mean matrix is reducible."""
