"""Batched Bessel function values over a symmetric order range."""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np


class BesselFamily(Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741
    K = "K"

    @property
    def reflection_sign(self) -> int:
        """Sign s in f_{-n} = s**n f_n."""
        return -1 if self in (BesselFamily.J, BesselFamily.Y) else 1


@dataclass(frozen=True, eq=False)
class BesselBatch:
    """Values and derivatives for orders -n_max..n_max at one or more arguments.

    Row ``n + n_max`` of ``values``/``derivatives`` holds order n; the
    remaining axes follow the shape of ``argument``. For ``scaled`` batches
    both arrays carry the factor exp(-|Re z|) (I) or exp(z) (K).
    """

    family: BesselFamily
    argument: Union[complex, np.ndarray]
    n_max: int
    values: np.ndarray
    derivatives: np.ndarray
    scaled: bool = False

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def value(self, n: int) -> np.ndarray:
        return self.values[n + self.n_max]

    def derivative(self, n: int) -> np.ndarray:
        return self.derivatives[n + self.n_max]

    def values_at(self, orders: np.ndarray) -> np.ndarray:
        return self.values[np.asarray(orders) + self.n_max]

    def derivatives_at(self, orders: np.ndarray) -> np.ndarray:
        return self.derivatives[np.asarray(orders) + self.n_max]

    def __repr__(self) -> str:
        """Family, order range and argument shape, for debugging."""
        kind = "scaled " if self.scaled else ""
        return f"BesselBatch({kind}{self.family.value}, n_max={self.n_max}, shape={np.shape(self.argument)})"
