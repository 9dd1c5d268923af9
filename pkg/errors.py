"""
Workbench Errors
Exception hierarchy shared by the algebra engine, the CLI and the web service.
"""

from typing import Optional


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""

    exit_code = 2


class ParseError(WorkbenchError):
    """
    Syntax or semantic error in an expression.

    Attributes:
        position: zero-based character offset of the offending input, when known
    """

    def __init__(self, message: str, position: Optional[int] = None):
        self.message, self.position = message, position
        if position is not None:
            message = f"Offset {position}: {message}"
        super().__init__(message)


class ConfigError(WorkbenchError):
    """Invalid settings file or environment override."""


class InvalidInputError(WorkbenchError):
    """Input violates the precondition of an operation."""


class FieldError(WorkbenchError):
    """Arithmetic that is impossible in the selected field."""


class FieldMismatchError(FieldError):
    """Operands live over different fields."""


class SubstitutionError(WorkbenchError):
    """A substitution image has a nonzero constant term."""


class SingularSubstitutionError(SubstitutionError):
    """The linear part of a substitution is not invertible."""


class NotFiniteError(WorkbenchError):
    """An operation needs a finite-dimensional quotient but none was certified."""


class ResourceCapExceeded(WorkbenchError):
    """A degree cap, search budget or enumeration budget was exhausted."""

    exit_code = 3
