"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class CnpickError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CnpickError, ValueError):
    """Malformed data: out-of-range values, shape mismatches, bad files."""


class SingularGramError(CnpickError):
    """A Gram matrix that must be positive definite is not.

    Carries the offending minimum eigenvalue in ``min_eig``.
    """

    def __init__(self, message: str, min_eig: float | None = None):
        super().__init__(message)
        self.min_eig = min_eig


class InfeasibleError(CnpickError):
    """Interpolation data admits no solution at the requested bound.

    ``min_eig`` holds the witnessing negative eigenvalue, and ``report``
    (when present) the full feasibility report that triggered the error.
    """

    def __init__(self, message: str, min_eig: float | None = None, report=None):
        super().__init__(message)
        self.min_eig = min_eig
        self.report = report


class DegenerateDataError(CnpickError):
    """Boundary-degenerate data: a unimodular Schur parameter appeared but
    the remaining targets are inconsistent with the forced constant."""


class MarginalDataError(CnpickError):
    """Data is at the edge of feasibility and defeated a tolerance-based
    search step; retrying with a slightly enlarged bound usually succeeds."""


class EvaluationError(CnpickError):
    """An objective returned a non-finite value during a grid scan.

    ``param`` records the offending grid point.
    """

    def __init__(self, message: str, param=None):
        super().__init__(message)
        self.param = param
