"""
Toolkit exceptions.

Two families matter to callers: PreconditionError for inputs an operation
refuses, VerificationError for checks that ran and failed. The CLI maps them
to exit statuses 2 and 3.
"""


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""


class PreconditionError(ToolkitError, ValueError):
    """An operation's precondition does not hold for the given input."""


class VerificationError(ToolkitError):
    """A computed object failed an exact check."""


class EnumerationCapError(PreconditionError):
    """An exhaustive enumeration would exceed the configured cap."""

    def __init__(self, size: int, cap: int, what: str = "enumeration"):
        self.size = size
        self.cap = cap
        super().__init__(f"{what} of {size} items exceeds the cap of {cap}")
