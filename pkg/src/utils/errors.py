"""Exception hierarchy shared by every package, with CLI exit codes."""

from typing import Any


class OutFnError(Exception):
    """Base error for the toolkit."""

    exit_code = 1


class InputError(OutFnError, ValueError):
    """Malformed input: unknown symbols, bad config, unreduced images."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ConvergenceError(OutFnError, ArithmeticError):
    """A limit did not settle within its iteration budget."""

    exit_code = 3

    def __init__(self, message: str, partial: list[float] | None = None):
        super().__init__(message)
        self.partial = list(partial or [])


class DegeneracyError(OutFnError):
    """A construction collapsed: relation cycles, zero vectors, equal trees."""

    exit_code = 3

    def __init__(self, message: str, detail: dict[str, Any] | None = None):
        super().__init__(message)
        self.detail = dict(detail or {})


class AssertionFailure(OutFnError):
    """A report-level assertion did not hold."""

    exit_code = 1
