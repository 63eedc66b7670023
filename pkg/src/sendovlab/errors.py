"""Exception hierarchy.

Two families map onto the CLI exit codes: :class:`ContractError` (bad input,
violated precondition; exit 1) and :class:`NumericError` (a computation that
did not converge or ran into a degenerate configuration; exit 2).
"""


class SendovLabError(Exception):
    pass


class ContractError(SendovLabError, ValueError):
    pass


class CapacityError(ContractError):
    pass


class ParseError(ContractError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class NumericError(SendovLabError, ArithmeticError):
    pass


class RootFindingError(NumericError):
    """Simultaneous iteration failed; carries the best iterate found."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class DegeneracyError(NumericError):
    """A critical point sits within the separation tolerance of a simple zero."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class BasinError(NumericError):
    pass


class BoundaryError(NumericError):
    """Continuation ran into the boundary of the stratum.

    ``trajectory`` holds every accepted state up to the event, so callers can
    keep the last good point.
    """

    def __init__(self, message, reason=None, trajectory=None):
        super().__init__(message)
        self.reason = reason
        self.trajectory = list(trajectory) if trajectory is not None else []

    @property
    def last_state(self):
        return self.trajectory[-1] if self.trajectory else None


class MinStepError(NumericError):
    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = list(trajectory) if trajectory is not None else []


class SamplerError(NumericError):
    pass
