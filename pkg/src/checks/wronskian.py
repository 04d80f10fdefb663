"""Wronskian checks for first/second-kind Mathieu pairs."""

from typing import Optional, Sequence

import numpy as np

from src.algorithms.mathieu import WRONSKIAN_TOLERANCE, wronskian_check
from src.checks.base import DiagnosticCheck
from src.models.function_id import Parity

DEFAULT_GRIDS = {
    "radial": (0.1, 0.4, 0.8, 1.3, 2.0, 2.6, 3.0),
    "angular": (0.0, 0.35, 0.9, 1.6, 2.4, 3.0),
    "modified": (0.2, 0.5, 1.0, 1.5),
}


class WronskianCheck(DiagnosticCheck):
    """W[first, second] is constant: 2/pi for radial and angular pairs, -1 for modified."""

    def __init__(
        self,
        parity: Parity,
        r: int,
        q: complex,
        pair: str = "radial",
        grid: Optional[Sequence[float]] = None,
        enabled: bool = True,
    ) -> None:
        super().__init__(f"wronskian/{pair}/{parity.value}/r={r}", WRONSKIAN_TOLERANCE, enabled)
        self.parity = parity
        self.r = r
        self.q = complex(q)
        self.pair = pair
        self.grid = np.asarray(grid if grid is not None else DEFAULT_GRIDS[pair], dtype=float)

    def measure(self) -> float:
        """Largest relative Wronskian deviation over the grid."""
        report = wronskian_check(self.parity, self.r, self.q, self.grid, pair=self.pair)
        return report.max_deviation

    def get_description(self) -> str:
        return f"{self.pair} Wronskian of the {self.parity.value} order-{self.r} pair at q={self.q}"
