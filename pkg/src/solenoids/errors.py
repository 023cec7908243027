"""Exception hierarchy shared by the package."""


class SolenoidError(Exception):
    """Base class for all errors raised by this package."""


class PresentationError(SolenoidError):
    """A presentation violates a structural invariant."""


class ParseError(PresentationError):
    """Malformed input text, with an optional source location."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class PreconditionError(SolenoidError):
    """An operation was called on input that fails its hypotheses."""


class AlgorithmAssumptionViolated(SolenoidError):
    """The rebasing algorithm met a situation excluded by the theory."""


class BudgetExceeded(AlgorithmAssumptionViolated):
    """A search or closure ran past its configured budget."""
