"""Identifiers for the sixteen Mathieu function families."""

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Tuple, Union

import numpy as np

from src.models.errors import DomainError

ComplexLike = Union[complex, np.ndarray]


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        """+1 for even, -1 for odd (behaviour under argument reflection)."""
        return 1 if self is Parity.EVEN else -1


class FunctionClass(Enum):
    ANGULAR = "angular"
    RADIAL = "radial"


class Kind(Enum):
    FIRST = "first"
    SECOND = "second"
    THIRD = "third"


# name -> (parity, class, kind, modified)
_FAMILIES: Dict[str, Tuple[Parity, FunctionClass, Kind, bool]] = {
    "ce": (Parity.EVEN, FunctionClass.ANGULAR, Kind.FIRST, False),
    "se": (Parity.ODD, FunctionClass.ANGULAR, Kind.FIRST, False),
    "fe": (Parity.EVEN, FunctionClass.ANGULAR, Kind.SECOND, False),
    "fo": (Parity.ODD, FunctionClass.ANGULAR, Kind.SECOND, False),
    "je": (Parity.EVEN, FunctionClass.RADIAL, Kind.FIRST, False),
    "jo": (Parity.ODD, FunctionClass.RADIAL, Kind.FIRST, False),
    "ye": (Parity.EVEN, FunctionClass.RADIAL, Kind.SECOND, False),
    "yo": (Parity.ODD, FunctionClass.RADIAL, Kind.SECOND, False),
    "he": (Parity.EVEN, FunctionClass.RADIAL, Kind.THIRD, False),
    "ho": (Parity.ODD, FunctionClass.RADIAL, Kind.THIRD, False),
    "ie": (Parity.EVEN, FunctionClass.RADIAL, Kind.FIRST, True),
    "io": (Parity.ODD, FunctionClass.RADIAL, Kind.FIRST, True),
    "ke": (Parity.EVEN, FunctionClass.RADIAL, Kind.THIRD, True),
    "ko": (Parity.ODD, FunctionClass.RADIAL, Kind.THIRD, True),
}


class FunctionId:
    """Selects one Mathieu family and its integer order.

    Angular functions with ``modified=True`` are the ordinary angular
    functions evaluated at -q; they have no name of their own.
    """

    def __init__(
        self,
        parity: Parity,
        function_class: FunctionClass,
        kind: Kind,
        modified: bool,
        r: int,
    ) -> None:
        """Initialize and validate a function identifier.

        Args:
            parity: Even or odd family
            function_class: Angular or radial
            kind: First, second or third kind
            modified: Whether the q -> -q continuation is requested
            r: Integer order

        Raises:
            DomainError: If the combination does not name a Mathieu function
        """
        if function_class is FunctionClass.ANGULAR and kind is Kind.THIRD:
            raise DomainError("angular functions have no third kind")
        if function_class is FunctionClass.RADIAL and modified and kind is Kind.SECOND:
            raise DomainError(
                "modified radial functions of the second kind are exposed as the third kind"
            )
        validate_order(parity, r)

        self.parity = parity
        self.function_class = function_class
        self.kind = kind
        self.modified = modified
        self.r = r

    @classmethod
    def from_name(cls, name: str, r: int) -> "FunctionId":
        """Build an identifier from a short family name such as ``ce`` or ``ko``.

        Raises:
            DomainError: If the name is unknown or the order is invalid
        """
        try:
            parity, function_class, kind, modified = _FAMILIES[name.lower()]
        except KeyError:
            raise DomainError(f"unknown Mathieu family '{name}'") from None
        return cls(parity, function_class, kind, modified, r)

    @property
    def name(self) -> str:
        """Short family name such as ``ke``; modified angular functions read ``ce(-q)`` or ``se(-q)``."""
        for key, family in _FAMILIES.items():
            if family == (self.parity, self.function_class, self.kind, self.modified):
                return key
        # angular modified families
        return ("ce" if self.parity is Parity.EVEN else "se") + "(-q)"

    def __eq__(self, other: object) -> bool:
        """Equal when family and order match."""
        if not isinstance(other, FunctionId):
            return False
        return (
            self.parity,
            self.function_class,
            self.kind,
            self.modified,
            self.r,
        ) == (other.parity, other.function_class, other.kind, other.modified, other.r)

    def __hash__(self) -> int:
        """Hash of family and order, for use as a cache key."""
        return hash((self.parity, self.function_class, self.kind, self.modified, self.r))

    def __repr__(self) -> str:
        """Family name and order, for debugging."""
        return f"FunctionId({self.name}, r={self.r})"


def family_names() -> Tuple[str, ...]:
    """Short names accepted by :meth:`FunctionId.from_name`."""
    return tuple(_FAMILIES)


def validate_order(parity: Parity, r: int) -> None:
    """Reject orders that do not exist for the given parity.

    Raises:
        DomainError: If r is negative, or zero for the odd family
    """
    if int(r) != r or r < 0:
        raise DomainError(f"order must be a non-negative integer, got {r}")
    if parity is Parity.ODD and r < 1:
        raise DomainError("odd Mathieu functions require r >= 1")


@dataclass(frozen=True)
class EvalResult:
    """A function value and its derivative with respect to theta or mu."""

    value: ComplexLike
    derivative: ComplexLike
