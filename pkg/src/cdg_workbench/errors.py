"""Exception hierarchy shared by every workbench module.

Validation failures carry a ``where`` mapping (axiom, basis elements, degree)
so a report can point at the exact offending datum.
"""

from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """Base class for all workbench errors."""

    def __init__(self, message: str, where: Optional[Dict[str, Any]] = None) -> None:
        self.where: Dict[str, Any] = dict(where or {})
        if self.where:
            details = ", ".join(f"{k}={v}" for k, v in sorted(self.where.items()))
            message = f"{message} ({details})"
        super().__init__(message)


class ValidationError(WorkbenchError, ValueError):
    """An input violates one of the structural axioms."""


# exact_linear / graded_core


class AmbientMismatch(WorkbenchError, ValueError):
    pass


class NotASubspace(WorkbenchError, ValueError):
    pass


class GradingMismatch(WorkbenchError, ValueError):
    pass


class NotAComplex(ValidationError):
    pass


class NotClosed(WorkbenchError, ValueError):
    pass


class WrongDegree(WorkbenchError, ValueError):
    pass


# cdg_algebra


class NotAssociative(ValidationError):
    pass


class UnitFailure(ValidationError):
    pass


class LeibnizFailure(ValidationError):
    pass


class CurvatureNotClosed(ValidationError):
    pass


class DSquareMismatch(ValidationError):
    pass


class CurvatureNotDivisible(ValidationError):
    pass


# cdg_module


class TNotNilpotent(ValidationError):
    pass


class NotRLinear(ValidationError):
    pass


class NotAssociativeAction(ValidationError):
    pass


class CurvatureLawFailure(ValidationError):
    pass


class AlgebraMismatch(WorkbenchError, ValueError):
    pass


class IndexOutOfRange(WorkbenchError, ValueError):
    pass


class BlockMismatch(WorkbenchError, ValueError):
    pass


# generators / derived functors / resolutions


class OrderNotSupported(WorkbenchError, ValueError):
    pass


class NoCertificate(WorkbenchError, ValueError):
    pass


class WindowTooWideForStages(WorkbenchError, ValueError):
    pass


class EquivalenceViolation(WorkbenchError, RuntimeError):
    """Two routes that must agree mathematically disagreed: an implementation bug."""


# workbench


class ParseError(WorkbenchError, ValueError):
    pass
