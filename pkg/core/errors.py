"""
Exception hierarchy.

Invalid input keeps raising a ValueError (callers that only know that contract
keep working); the subclasses let the command line tell the failure kinds apart.
"""


class DPCoverError(Exception):
    """Base class of every error raised on purpose by this package."""


class ParseError(DPCoverError, ValueError):
    def __init__(self, message: str, line_number: int = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ValidationError(DPCoverError, ValueError):
    pass


class RegimeError(DPCoverError, ValueError):
    """The parameter regime required by an algorithm's guarantee cannot be met."""


class OracleLimitError(DPCoverError, ValueError):
    """An exhaustive oracle was asked for an instance beyond its size limit."""


class InfeasibleError(DPCoverError, RuntimeError):
    """
    No acceptable solution was produced.

    `diagnostics` carries whatever the solver had at hand (best round, traces)
    so the caller can still report it.
    """

    def __init__(self, message: str, diagnostics=None):
        self.diagnostics = diagnostics
        super().__init__(message)
