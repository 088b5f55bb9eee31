"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class DialokitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(DialokitError):
    """Input data violates a documented contract (exit code 1 in the CLI)."""


class CorpusFormatError(ValidationError):
    """A corpus record could not be parsed; carries file/line context."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = path
            if line is not None:
                prefix += f":{line}"
            prefix += ": "
        super().__init__(prefix + message)


class PoolExhaustedError(DialokitError):
    """Name replacement could not be drawn within the redraw budget."""
