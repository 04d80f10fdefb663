"""Base classes for the numerical diagnostic checks."""

from abc import ABC, abstractmethod
from typing import Any, Dict


class DiagnosticCheck(ABC):
    """Abstract base class for a self-consistency check.

    A check evaluates one identity (a Wronskian, a normalization, an ODE
    residual...) and reports the largest deviation it saw against its
    tolerance. Checks can be enabled and disabled independently.
    """

    def __init__(self, name: str, tolerance: float, enabled: bool = True) -> None:
        """Initialize the check.

        Args:
            name: Unique name, used as the registry key
            tolerance: Largest deviation that still passes
            enabled: Whether this check is currently active
        """
        self.name = name
        self.tolerance = tolerance
        self.enabled = enabled

    @abstractmethod
    def measure(self) -> float:
        """Compute the largest deviation from the identity being checked.

        Returns:
            Non-negative deviation (relative unless documented otherwise)
        """
        pass

    @abstractmethod
    def get_description(self) -> str:
        """Get a human-readable description of this check.

        Returns:
            Description of the identity being verified
        """
        pass

    def run(self) -> "CheckResult":
        """Measure once and compare the deviation with the tolerance."""
        deviation = self.measure()
        return CheckResult(
            passed=bool(deviation <= self.tolerance),
            check_name=self.name,
            max_deviation=deviation,
            tolerance=self.tolerance,
        )

    def enable(self) -> None:
        """Include this check when its suite runs."""
        self.enabled = True

    def disable(self) -> None:
        """Skip this check in suite runs; it can still be run by name."""
        self.enabled = False

    def is_enabled(self) -> bool:
        """Whether :meth:`CheckManager.run_all` will measure this check."""
        return self.enabled

    def __repr__(self) -> str:
        """Class, name, tolerance and whether suite runs include the check."""
        state = "active" if self.enabled else "inactive"
        return f"{self.__class__.__name__}({self.name!r}, tol={self.tolerance:g}, {state})"


class CheckResult:
    """Result of running one diagnostic check."""

    def __init__(
        self,
        passed: bool,
        check_name: str,
        max_deviation: float = 0.0,
        tolerance: float = 0.0,
        reason: str = "",
    ) -> None:
        """Initialize check result.

        Args:
            passed: Whether the deviation stayed within tolerance
            check_name: Name of the check that was run
            max_deviation: Largest deviation observed
            tolerance: Tolerance the deviation was compared with
            reason: Optional reason for failure
        """
        self.passed = passed
        self.check_name = check_name
        self.max_deviation = max_deviation
        self.tolerance = tolerance
        self.reason = reason

    def to_dict(self) -> Dict[str, Any]:
        """Plain mapping used by the json and csv renderers."""
        return {
            "check": self.check_name,
            "status": "PASS" if self.passed else "FAIL",
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "reason": self.reason,
        }

    def __bool__(self) -> bool:
        """Allow using CheckResult in boolean contexts."""
        return self.passed

    def __repr__(self) -> str:
        """String representation for debugging."""
        status = "PASS" if self.passed else "FAIL"
        reason_part = f", reason: {self.reason}" if self.reason else ""
        return f"CheckResult({status}, {self.check_name}, max_deviation={self.max_deviation:.3g}{reason_part})"
