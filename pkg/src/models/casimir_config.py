"""Geometry, boundary conditions and result records for strip-plane Casimir runs."""

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.models.errors import DomainError
from src.models.function_id import Parity

logger = logging.getLogger(__name__)

PFA_COEFFICIENT = math.pi**2 / 720.0

# relative clearance required between an elliptic cylinder and the plane
CLEARANCE_MARGIN = 1e-3


class BoundaryCondition(Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ELECTROMAGNETIC = "em"

    @classmethod
    def parse(cls, text: str) -> "BoundaryCondition":
        """Parse ``dirichlet``/``neumann``/``em`` and their one-letter forms."""
        aliases = {"d": cls.DIRICHLET, "n": cls.NEUMANN, "electromagnetic": cls.ELECTROMAGNETIC}
        key = text.strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown boundary condition '{text}'") from None

    @property
    def plane_reflection(self) -> float:
        """Reflection factor of the plane: -1 for Dirichlet, +1 for Neumann."""
        if self is BoundaryCondition.ELECTROMAGNETIC:
            raise DomainError("the electromagnetic case is a sum of two scalar problems")
        return -1.0 if self is BoundaryCondition.DIRICHLET else 1.0

    def scalar_conditions(self) -> Tuple["BoundaryCondition", ...]:
        """Scalar conditions summed into this one (D and N for em)."""
        if self is BoundaryCondition.ELECTROMAGNETIC:
            return (BoundaryCondition.DIRICHLET, BoundaryCondition.NEUMANN)
        return (self,)


class ParitySector(Enum):
    """Channels whose angular-function parity matches the parity of r, or not."""

    MATCHED = "matched"
    MISMATCHED = "mismatched"

    @property
    def reflection_sign(self) -> float:
        """Sign the plane reflection contributes to the round-trip kernel."""
        return 1.0 if self is ParitySector.MATCHED else -1.0

    def channel_parity(self, r: int) -> Parity:
        """Parity of the angular function (ce or se) carried by order r in this sector."""
        even_r = r % 2 == 0
        if self is ParitySector.MATCHED:
            return Parity.EVEN if even_r else Parity.ODD
        return Parity.ODD if even_r else Parity.EVEN

    def orders(self, r_max: int) -> List[int]:
        """Channel orders 0..r_max (matched) or 1..r_max (mismatched)."""
        start = 0 if self is ParitySector.MATCHED else 1
        return list(range(start, r_max + 1))


@dataclass(frozen=True)
class QuadratureSettings:
    """Panel layouts for the u-integral (kernel) and the p-integral (energy).

    Attributes:
        u_panels: Initial number of Gauss-Legendre panels on [0, u_max]
        u_nodes: Nodes per u panel
        u_max_panels: Panel count at which u-doubling gives up
        exponent_cutoff: u_max is where 2pH (cosh u - 1) reaches this value
        p_panels: Panels on log s, s = 2pH
        p_nodes: Nodes per p panel
        s_min: Lower end of the s range
        s_max: Upper end of the s range
        refine_p: Re-run the p-integral with doubled panels to estimate its error
    """

    u_panels: int = 8
    u_nodes: int = 16
    u_max_panels: int = 512
    exponent_cutoff: float = 36.0
    p_panels: int = 8
    p_nodes: int = 8
    s_min: float = 1e-4
    s_max: float = 40.0
    refine_p: bool = True

    def __post_init__(self) -> None:
        if min(self.u_panels, self.u_nodes, self.p_panels, self.p_nodes) < 1:
            raise DomainError("quadrature panel and node counts must be positive")
        if self.u_max_panels < self.u_panels:
            raise DomainError("u_max_panels must be at least u_panels")
        if not 0 < self.s_min < self.s_max:
            raise DomainError("require 0 < s_min < s_max")
        if self.exponent_cutoff <= 0:
            raise DomainError("exponent_cutoff must be positive")

    def doubled(self) -> "QuadratureSettings":
        """Same layout with twice the p panels, for the p-integral error estimate."""
        return replace(self, p_panels=2 * self.p_panels)


@dataclass(frozen=True)
class CasimirConfig:
    """One strip (mu0 = 0) or elliptic cylinder opposite a plane.

    Attributes:
        d: Half-width of the strip (focal half-distance of the ellipse)
        H: Height of the center above the plane
        mu0: Elliptic radius of the scatterer surface
        phi: Tilt angle; only 0 is supported
        bc: Dirichlet, Neumann or electromagnetic (their sum)
        r_max: Channel cutoff; None chooses a default and grows it as needed
        quad: Quadrature settings
        tol: Relative tolerance for the kernel quadrature
        workers: Size of the process pool used for p-nodes (1 = in-process)
        extrapolate: Extrapolate each energy in the channel cutoff (needs r_max >= 8)
    """

    d: float
    H: float
    mu0: float = 0.0
    phi: float = 0.0
    bc: BoundaryCondition = BoundaryCondition.ELECTROMAGNETIC
    r_max: Optional[int] = None
    quad: QuadratureSettings = field(default_factory=QuadratureSettings)
    tol: float = 1e-6
    workers: int = 1
    extrapolate: bool = True

    def __post_init__(self) -> None:
        if self.phi != 0:
            raise DomainError("tilted strips are not supported (phi must be 0)")
        if self.d <= 0 or self.H <= 0:
            raise DomainError(f"d and H must be positive, got d={self.d}, H={self.H}")
        if self.mu0 < 0:
            raise DomainError("mu0 must be non-negative")
        if self.mu0 > 0:
            half_height = self.d * math.sinh(self.mu0)
            if self.H <= half_height * (1.0 + CLEARANCE_MARGIN):
                raise DomainError(
                    f"cylinder of semi-minor axis {half_height:.6g} touches the plane at H={self.H}"
                )
        elif self.H <= self.d:
            logger.warning("strip center height H=%g does not exceed the half-width d=%g", self.H, self.d)
        if self.r_max is not None and self.r_max < 2:
            raise DomainError("r_max must be at least 2")
        if not 0 < self.tol < 1:
            raise DomainError("tol must lie in (0, 1)")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")

    @property
    def aspect(self) -> float:
        """2d/H, the ratio the edge expansion is organized in."""
        return 2.0 * self.d / self.H

    @property
    def default_r_max(self) -> int:
        """Channel cutoff used when r_max is not given: 12, or 16 close to the plane."""
        return 12 if self.aspect <= 4.0 else 16

    def q_at(self, p: float) -> complex:
        """Mathieu parameter q = -(d p)^2 / 4 for imaginary wavenumber p."""
        return complex(-((self.d * p) ** 2) / 4.0, 0.0)

    def with_changes(self, **changes) -> "CasimirConfig":
        """Copy with some fields replaced; validation runs again."""
        return replace(self, **changes)


@dataclass(frozen=True)
class EnergyRecord:
    """Energy per unit length for one height, in units of hbar c / length^2."""

    H: float
    energy_per_length: float
    ratio_pfa: float
    est_error: float
    r_max_used: int
    parts: Dict[str, float] = field(default_factory=dict)
    extrapolated: bool = False


@dataclass
class EnergyCurve:
    """Energy records for one strip width over a set of heights."""

    d: float
    bc: BoundaryCondition
    mu0: float = 0.0
    records: List[EnergyRecord] = field(default_factory=list)

    def add(self, record: EnergyRecord) -> None:
        """Append one record."""
        self.records.append(record)

    def heights(self) -> np.ndarray:
        return np.array([record.H for record in self.records])

    def ratios(self) -> np.ndarray:
        return np.array([record.ratio_pfa for record in self.records])

    def errors(self) -> np.ndarray:
        return np.array([record.est_error for record in self.records])

    def __len__(self) -> int:
        return len(self.records)

    def __repr__(self) -> str:
        """Width, condition and number of points, for debugging."""
        return f"EnergyCurve(d={self.d}, bc={self.bc.value}, points={len(self.records)})"
