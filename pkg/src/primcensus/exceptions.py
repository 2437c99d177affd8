"""
Error hierarchy for primcensus.

Each class maps to one CLI exit code through exit_code_for.
"""

from typing import Optional


class PrimCensusError(Exception):
    """Base class for all primcensus errors."""


class DomainError(PrimCensusError, ValueError):
    """Mathematically invalid input (non-prime modulus, u divisible by p, ...)."""


class ResourceError(PrimCensusError, RuntimeError):
    """A configured ceiling was exceeded, or an I/O operation failed."""


class DataError(PrimCensusError, ValueError):
    """A persisted record failed validation."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class VerificationError(PrimCensusError, AssertionError):
    """A named invariant did not hold numerically."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        self.detail = detail
        super().__init__(f"invariant '{invariant}' failed: {detail}")


EXIT_USAGE = 64


def exit_code_for(error: PrimCensusError) -> int:
    """CLI exit status: 1 domain/data, 2 resource, 3 verification."""
    if isinstance(error, VerificationError):
        return 3
    if isinstance(error, ResourceError):
        return 2
    return 1
