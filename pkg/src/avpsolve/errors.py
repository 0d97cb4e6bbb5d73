"""Exception hierarchy shared across the package."""

from __future__ import annotations


class AvpError(Exception):
    """Base class for every error raised by avpsolve."""


class InvalidArgumentError(AvpError, ValueError):
    pass


class InvalidStepError(InvalidArgumentError):
    pass


class UnsupportedMethodError(AvpError):
    pass


class NumericOverflowError(AvpError, ArithmeticError):
    """A right-hand side or iterate became non-finite.

    ``index`` is the grid index of the failing step when the error comes out
    of a leg integration, ``leg`` names the leg for arbitrary value solves.
    """

    def __init__(self, message: str, index: int | None = None, leg: str | None = None):
        self.index = index
        self.leg = leg
        self.base_message = message
        super().__init__(self._render())

    def _render(self) -> str:
        parts = [self.base_message]
        if self.index is not None:
            parts.append(f"at grid index {self.index}")
        if self.leg is not None:
            parts.append(f"on {self.leg} leg")
        return " ".join(parts)

    def annotate(self, index: int | None = None, leg: str | None = None) -> "NumericOverflowError":
        return NumericOverflowError(
            self.base_message,
            index=self.index if index is None else index,
            leg=self.leg if leg is None else leg,
        )


class GridMisalignmentError(AvpError):
    def __init__(self, message: str, break_point: float):
        self.break_point = break_point
        super().__init__(message)


class DegenerateOrderError(AvpError):
    pass


class ExpressionError(AvpError):
    pass


class ExprSyntaxError(ExpressionError):
    """Malformed expression text. ``offset`` is a 0-based character offset."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class UnknownIdentifierError(ExpressionError):
    def __init__(self, name: str, offset: int | None = None):
        self.name = name
        self.offset = offset
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"unknown identifier {name!r}{where}")


class EvaluationError(ExpressionError):
    pass


class SystemCompileError(ExpressionError):
    """Aggregates per-component failures of :func:`avpsolve.expr.compile_system`."""

    def __init__(self, failures: list[tuple[int, ExpressionError]]):
        self.failures = failures
        lines = [f"component {i + 1}: {err}" for i, err in failures]
        super().__init__("; ".join(lines))


class ProblemFileError(AvpError):
    pass
