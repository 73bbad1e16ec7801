"""Exception types shared across the package."""

from __future__ import annotations


class ParastructError(Exception):
    pass


class DomainError(ParastructError, ValueError):
    """An operation was applied outside its domain (singular frame, bad arity, ...)."""

    def __init__(self, message: str, point=None):
        if point is not None:
            message = f"{message} at point {format_point(point)}"
        super().__init__(message)
        self.point = point


class SingularFrameError(DomainError):
    pass


class FieldEvaluationError(ParastructError):
    """Evaluating a user-supplied expression failed at a concrete point."""

    def __init__(self, message: str, point=None, expression: str | None = None):
        parts = [message]
        if expression is not None:
            parts.append(f"in expression {expression!r}")
        if point is not None:
            parts.append(f"at point {format_point(point)}")
        super().__init__(" ".join(parts))
        self.point = point
        self.expression = expression


def format_point(point) -> str:
    return "(" + ", ".join(f"{float(x):.12g}" for x in point) + ")"
