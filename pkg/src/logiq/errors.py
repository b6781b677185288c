"""Exception hierarchy shared by every logiq module."""


class LogiqError(Exception):
    """Base class for all library errors."""


class FormatError(LogiqError, ValueError):
    """Malformed input text (graph files, formulas, JSON documents).

    ``line`` and ``pos`` are 1-based when known.
    """

    def __init__(self, message, line=None, pos=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"position {pos}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.pos = pos


class ValidationError(LogiqError, ValueError):
    """A structure violates its invariants; ``violations`` lists the witnesses."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class CapExceededError(LogiqError):
    """An exponential routine was asked to run beyond its configured size cap."""


class InfeasibleError(LogiqError):
    """No feasible solution exists (or none was found by the algorithm)."""
