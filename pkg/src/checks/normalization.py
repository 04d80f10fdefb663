"""Normalization of the angular functions."""

import numpy as np

from src.algorithms.mathieu import angular_first
from src.checks.base import DiagnosticCheck
from src.models.function_id import Parity

NORMALIZATION_TOLERANCE = 1e-12
GRID_POINTS = 256


class NormalizationCheck(DiagnosticCheck):
    """(1/pi) times the integral of ce_r^2 (or se_r^2) over a period equals 1.

    The square is not conjugated, so the identity also holds for complex q.
    The periodic trapezoid rule is spectrally accurate here.
    """

    def __init__(self, parity: Parity, r: int, q: complex, enabled: bool = True) -> None:
        super().__init__(f"normalization/{parity.value}/r={r}", NORMALIZATION_TOLERANCE, enabled)
        self.parity = parity
        self.r = r
        self.q = complex(q)

    def measure(self) -> float:
        """Distance of (1/pi) * integral of the squared function over a period from 1."""
        theta = np.linspace(0.0, 2.0 * np.pi, GRID_POINTS, endpoint=False)
        values = angular_first(self.parity, self.r, self.q, theta).value
        integral = np.sum(values * values) * (2.0 * np.pi / GRID_POINTS) / np.pi
        return float(abs(integral - 1.0))

    def get_description(self) -> str:
        family = "ce" if self.parity is Parity.EVEN else "se"
        return f"unit normalization of {family}_{self.r} at q={self.q}"
