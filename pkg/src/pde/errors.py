"""Shared exception base classes."""


class PdeError(Exception):
    """Base class for every error raised by this package."""


class InvalidCodeError(PdeError):
    """A code string failed alphabet validation (raised where a code is consumed,
    wrapping the underlying lexicon error)."""

    def __init__(self, raw: str, cause: Exception):
        super().__init__(f"invalid code {raw!r}: {cause}")
        self.raw = raw
        self.cause = cause
