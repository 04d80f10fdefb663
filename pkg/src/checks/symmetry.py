"""Reflection identities between the angular functions at q and -q."""

import numpy as np

from src.algorithms.mathieu import angular_first
from src.checks.base import DiagnosticCheck
from src.models.function_id import Parity

SYMMETRY_TOLERANCE = 1e-9
SAMPLE_ANGLES = (0.0, 0.25, 0.7, 1.2, 1.9, 2.8, 0.5j, 2.0j, 0.4 + 1.0j, 1.1 - 2.0j)


def reflection_partner(parity: Parity, r: int) -> Parity:
    """Parity of the function at q that ce_r / se_r at -q maps onto."""
    if r % 2 == 0:
        return parity
    return Parity.ODD if parity is Parity.EVEN else Parity.EVEN


def reflection_sign(parity: Parity, r: int) -> float:
    """Sign s in ce/se_r(pi/2 - theta, q) = s * partner(theta, -q)."""
    if r % 2 == 1:
        exponent = (r - 1) // 2
    else:
        exponent = r // 2 if parity is Parity.EVEN else r // 2 - 1
    return -1.0 if exponent % 2 else 1.0


class SymmetryCheck(DiagnosticCheck):
    """ce_r(-q, x) and se_r(-q, x) against +-ce_r/se_r(q, pi/2 - x).

    Holds with the sign convention of the coefficients whenever Re q != 0.
    """

    def __init__(self, parity: Parity, r: int, q: complex, enabled: bool = True) -> None:
        super().__init__(f"symmetry/{parity.value}/r={r}", SYMMETRY_TOLERANCE, enabled)
        self.parity = parity
        self.r = r
        self.q = complex(q)

    def measure(self) -> float:
        """Largest deviation of the reflection identity over the sample angles, relative to the envelope."""
        theta = np.asarray(SAMPLE_ANGLES, dtype=complex)
        reflected = angular_first(self.parity, self.r, -self.q, theta).value
        partner = reflection_partner(self.parity, self.r)
        direct = angular_first(partner, self.r, self.q, np.pi / 2 - theta).value
        expected = reflection_sign(self.parity, self.r) * direct
        scale = max(float(np.max(np.abs(expected))), 1e-300)
        return float(np.max(np.abs(reflected - expected)) / scale)

    def get_description(self) -> str:
        return f"q -> -q reflection of the {self.parity.value} order-{self.r} angular function at q={self.q}"
