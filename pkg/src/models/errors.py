"""Exception hierarchy shared by the numerical modules and the CLI."""

from typing import Optional


class MathieuError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MathieuError, ValueError):
    """Raised when inputs lie outside the domain of an operation."""


class BesselOverflowError(MathieuError, OverflowError):
    """Raised when a Bessel value or series sum is not representable."""


class BranchTrackingError(MathieuError, RuntimeError):
    """Raised when eigenvalue continuation cannot follow a branch unambiguously."""


class ConvergenceError(MathieuError, RuntimeError):
    """Raised when an iterative or truncated computation fails to converge.

    Attributes:
        attempted: The last truncation, panel count or cutoff that was tried
    """

    def __init__(self, message: str, attempted: Optional[float] = None) -> None:
        super().__init__(message)
        self.attempted = attempted


class DeterminantError(MathieuError, RuntimeError):
    """Raised when a sector determinant is not positive."""


class FitError(MathieuError, ValueError):
    """Raised when the edge-coefficient fit is under-determined or ill-conditioned."""
