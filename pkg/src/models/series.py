"""Series descriptors and coefficient tables for Mathieu function expansions."""

from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from src.models.function_id import Parity, validate_order


@dataclass(frozen=True)
class SeriesSpec:
    """Order-dependent constants shared by the Fourier and Bessel-product series.

    Attributes:
        parity: Even (ce family, A coefficients) or odd (se family, B coefficients)
        r: Order of the function
        p: r mod 2
        delta: Sign applied to the normalized coefficients (-1 only for Re q < 0)
        sigma: 1/2 for r = 0, otherwise 1
    """

    parity: Parity
    r: int
    p: int
    delta: int
    sigma: float

    @classmethod
    def create(cls, parity: Parity, r: int, q: complex) -> "SeriesSpec":
        """Derive p, delta and sigma for (parity, r, q).

        Raises:
            DomainError: If the order is invalid for the parity
        """
        validate_order(parity, r)
        p = r % 2
        delta = 1
        if complex(q).real < 0:
            # the sign that makes the coefficient of order r continuous from q = 0
            exponent = (r - p) // 2 if parity is Parity.EVEN else (r - 2 + p) // 2
            delta = -1 if exponent % 2 else 1
        sigma = 0.5 if r == 0 else 1.0
        return cls(parity=parity, r=r, p=p, delta=delta, sigma=sigma)

    @property
    def first_order(self) -> int:
        """Lowest Fourier order present in the series (B_0 never appears)."""
        if self.parity is Parity.ODD and self.p == 0:
            return 2
        return self.p

    @property
    def leading_index(self) -> int:
        """Position of the order-r coefficient inside the coefficient array."""
        return (self.r - self.first_order) // 2

    @property
    def s(self) -> int:
        """Shift s of the inner Bessel order in the products J_{m-s} J_{m+t}."""
        return (self.r - self.p) // 2

    @property
    def t(self) -> int:
        return (self.r + self.p) // 2


@dataclass(frozen=True)
class CharValue:
    """Characteristic value a_r(q) (even) or b_r(q) (odd)."""

    parity: Parity
    r: int
    q: complex
    alpha: complex
    matrix_dim: int


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Normalized A_{2m+p} or B_{2m+p} coefficients for one (parity, r, q).

    ``orders[k]`` is the Fourier order carried by ``coeffs[k]``.
    """

    spec: SeriesSpec
    q: complex
    alpha: complex
    orders: np.ndarray
    coeffs: np.ndarray
    norm: complex
    meet_index: int

    @property
    def M(self) -> int:
        """Truncation index: the table holds coefficients 0..M."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        """The coefficient of order r."""
        return complex(self.coeffs[self.spec.leading_index])

    def coefficient(self, n: int) -> complex:
        """Coefficient of Fourier order n, zero when absent from the table."""
        k, rem = divmod(n - self.spec.first_order, 2)
        if rem or k < 0 or k > self.M:
            return 0j
        return complex(self.coeffs[k])

    def tail_ratio(self) -> float:
        """Last coefficient relative to the largest one."""
        scale = np.max(np.abs(self.coeffs))
        return float(abs(self.coeffs[-1]) / scale) if scale > 0 else 0.0

    def __repr__(self) -> str:
        """Order, parameter, truncation and characteristic value, for debugging."""
        return (
            f"CoefficientTable({self.spec.parity.value}, r={self.spec.r}, q={self.q}, "
            f"M={self.M}, alpha={self.alpha})"
        )


@dataclass(frozen=True, eq=False)
class SecondKindTable:
    """G (even) or H (odd) coefficients of the second-kind angular functions.

    The function is ``scale * (theta_weight * theta * X(theta) + sum c_n trig(n theta))``
    where X is the first-kind partner, trig is sin for the even family and cos
    for the odd family.

    Attributes:
        rho: Multiple of the first-kind coefficients removed from the
            particular solution (rho_qe, rho_qo, rho_te or rho_to)
        alpha_sums: The coefficient power sums entering the printed prefactor
        scale: Prefactor enforcing W{first, second} = 2/pi
        literal_discrepancy: Wronskian produced by the printed prefactor,
            divided by 2/pi
    """

    spec: SeriesSpec
    q: complex
    orders: np.ndarray
    coeffs: np.ndarray
    rho: complex
    alpha_sums: Dict[str, complex]
    scale: complex
    theta_weight: float
    literal_discrepancy: complex
    first_kind: CoefficientTable = field(repr=False)

    def __repr__(self) -> str:
        """Order, parameter, rho and length, for debugging."""
        return (
            f"SecondKindTable({self.spec.parity.value}, r={self.spec.r}, q={self.q}, "
            f"rho={self.rho}, terms={len(self.coeffs)})"
        )
