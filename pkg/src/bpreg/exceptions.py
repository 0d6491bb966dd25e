"""Exception types raised across the package."""


class BpregError(Exception):
    """Base class for all package specific errors."""


class DomainError(BpregError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class InvalidData(BpregError, ValueError):
    """A design matrix or response vector violates the model requirements."""


class SingularInformation(BpregError):
    """The expected information matrix is numerically singular."""


class NonConvergence(BpregError):
    """An iterative fit exhausted its iteration or step-halving budget."""

    def __init__(self, message, iterations=None, last_theta=None):
        super().__init__(message)
        self.iterations = iterations
        self.last_theta = last_theta


class ExcessiveFailures(BpregError):
    """Too many Monte Carlo replicates failed to fit."""


class ParseError(BpregError, ValueError):
    """A CSV cell or structural element could not be parsed."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class RaggedRows(ParseError):
    """A CSV row has a field count different from the header."""


class NonPositiveResponse(BpregError, ValueError):
    """The declared response column contains a value that is not positive."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
