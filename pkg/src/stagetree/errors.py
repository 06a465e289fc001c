"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: usage errors exit 1, ValidationError
exits 2, NumericError exits 3.
"""


class StagetreeError(Exception):
    """Base class for all package errors."""


class ValidationError(StagetreeError):
    """Invalid data, schema, or configuration supplied by the caller."""


class NumericError(StagetreeError):
    """Numeric domain violation (zero probabilities, undefined scores)."""
