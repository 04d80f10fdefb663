"""Check manager for registering and running diagnostic suites."""

import logging
from typing import Dict, List

from src.checks.base import CheckResult, DiagnosticCheck
from src.models.errors import MathieuError

logger = logging.getLogger(__name__)


class CheckManager:
    """Manages a named, ordered collection of diagnostic checks.

    Checks can be added, removed, enabled and disabled by name; running the
    manager evaluates every enabled check in insertion order.
    """

    def __init__(self) -> None:
        """Initialize the check manager."""
        self._checks: Dict[str, DiagnosticCheck] = {}
        self._check_order: List[str] = []

    def add_check(self, check: DiagnosticCheck) -> None:
        """Add a check to the manager.

        Args:
            check: The check to add

        Raises:
            ValueError: If a check with the same name already exists
        """
        if check.name in self._checks:
            raise ValueError(f"Check '{check.name}' already exists")

        self._checks[check.name] = check
        self._check_order.append(check.name)

    def remove_check(self, name: str) -> bool:
        """Remove a check by name.

        Returns:
            True if check was removed, False if it didn't exist
        """
        if name not in self._checks:
            return False

        del self._checks[name]
        self._check_order.remove(name)
        return True

    def get_check(self, name: str) -> DiagnosticCheck:
        """Get a check by name.

        Raises:
            KeyError: If check doesn't exist
        """
        return self._checks[name]

    def enable_check(self, name: str) -> bool:
        """Include a registered check in run_all.

        Returns:
            False if no check has that name
        """
        if name not in self._checks:
            return False

        self._checks[name].enable()
        return True

    def disable_check(self, name: str) -> bool:
        """Leave a registered check out of run_all.

        Returns:
            False if no check has that name
        """
        if name not in self._checks:
            return False

        self._checks[name].disable()
        return True

    def is_check_enabled(self, name: str) -> bool:
        """Whether run_all includes the named check (False when unknown)."""
        if name not in self._checks:
            return False

        return self._checks[name].is_enabled()

    def run_check(self, name: str) -> CheckResult:
        """Run one check, turning library errors into a failed result.

        Args:
            name: Name of the check

        Returns:
            CheckResult of the run
        """
        check = self._checks[name]
        try:
            return check.run()
        except MathieuError as e:
            logger.warning("check '%s' raised %s: %s", name, type(e).__name__, e)
            return CheckResult(
                passed=False,
                check_name=name,
                tolerance=check.tolerance,
                reason=f"{type(e).__name__}: {e}",
            )

    def run_all(self) -> List[CheckResult]:
        """Run every enabled check in order.

        Returns:
            One CheckResult per enabled check
        """
        return [self.run_check(name) for name in self._check_order if self._checks[name].is_enabled()]

    def all_passed(self) -> bool:
        """Run every enabled check and report whether all stayed within tolerance."""
        return all(self.run_all())

    def get_enabled_checks(self) -> List[DiagnosticCheck]:
        """Enabled checks in registration order."""
        return [self._checks[name] for name in self._check_order if self._checks[name].is_enabled()]

    def get_check_names(self) -> List[str]:
        """Get names of all checks.

        Returns:
            List of check names in order
        """
        return self._check_order.copy()

    def clear_checks(self) -> None:
        """Remove all checks."""
        self._checks.clear()
        self._check_order.clear()

    def __len__(self) -> int:
        """Number of registered checks, enabled or not."""
        return len(self._check_order)
