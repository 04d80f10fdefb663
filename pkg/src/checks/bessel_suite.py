"""Checks on the batched Bessel recurrences."""

from typing import Sequence

import numpy as np
from scipy import special

from src.algorithms.bessel import bessel_batch
from src.checks.base import DiagnosticCheck
from src.models.bessel_batch import BesselFamily

BESSEL_TOLERANCE = 1e-10
DEFAULT_ARGUMENTS = (0.5, 1.0, 3.7, 10.0, 2.0 + 1.0j)

_REFERENCE = {
    BesselFamily.J: special.jv,
    BesselFamily.Y: special.yv,
    BesselFamily.I: special.iv,
    BesselFamily.K: special.kv,
}


class BesselReferenceCheck(DiagnosticCheck):
    """Batched values of one family against scipy.special, order by order.

    J and Y are compared relative to the envelope sqrt(|J|^2 + |Y|^2) so that
    zeros of either function do not inflate the deviation.
    """

    def __init__(
        self,
        family: BesselFamily,
        n_max: int = 20,
        arguments: Sequence[complex] = DEFAULT_ARGUMENTS,
        enabled: bool = True,
    ) -> None:
        super().__init__(f"bessel/reference/{family.value}", BESSEL_TOLERANCE, enabled)
        self.family = family
        self.n_max = n_max
        self.arguments = np.asarray(arguments, dtype=complex)

    def measure(self) -> float:
        """Largest relative difference from scipy over all orders and arguments."""
        batch = bessel_batch(self.family, self.arguments, self.n_max)
        orders = np.arange(self.n_max + 1)[:, None]
        reference = _REFERENCE[self.family](orders, self.arguments[None, :])
        if self.family in (BesselFamily.J, BesselFamily.Y):
            scale = np.hypot(np.abs(special.jv(orders, self.arguments)), np.abs(special.yv(orders, self.arguments)))
        else:
            scale = np.abs(reference)
        values = batch.values_at(np.arange(self.n_max + 1))
        return float(np.max(np.abs(values - reference) / scale))

    def get_description(self) -> str:
        return f"{self.family.value}_n for n <= {self.n_max} against scipy.special"


class BesselCrossProductCheck(DiagnosticCheck):
    """J_n Y_{n+1} - J_{n+1} Y_n = -2/(pi z) and I_n K_{n+1} + I_{n+1} K_n = 1/z."""

    def __init__(
        self,
        modified: bool = False,
        n_max: int = 20,
        arguments: Sequence[complex] = DEFAULT_ARGUMENTS,
        enabled: bool = True,
    ) -> None:
        label = "IK" if modified else "JY"
        super().__init__(f"bessel/cross/{label}", BESSEL_TOLERANCE, enabled)
        self.modified = modified
        self.n_max = n_max
        self.arguments = np.asarray(arguments, dtype=complex)

    def measure(self) -> float:
        """Largest deviation of the cross-order Wronskian from its closed form."""
        z = self.arguments
        low = np.arange(self.n_max)
        regular, singular = (BesselFamily.I, BesselFamily.K) if self.modified else (BesselFamily.J, BesselFamily.Y)
        first = bessel_batch(regular, z, self.n_max)
        second = bessel_batch(singular, z, self.n_max)
        leading = first.values_at(low) * second.values_at(low + 1)
        crossed = first.values_at(low + 1) * second.values_at(low)
        if self.modified:
            product, expected = leading + crossed, 1.0 / z
        else:
            product, expected = leading - crossed, -2.0 / (np.pi * z)
        scale = np.maximum(np.abs(leading), np.abs(expected)[None, :])
        return float(np.max(np.abs(product - expected[None, :]) / scale))

    def get_description(self) -> str:
        pair = "I/K" if self.modified else "J/Y"
        return f"{pair} cross-product identity for n < {self.n_max}"
