"""Residual of the Mathieu differential equations by finite differences."""

from typing import Optional, Sequence

import numpy as np

from src.algorithms.characteristic import char_value
from src.algorithms.mathieu import evaluate
from src.checks.base import DiagnosticCheck
from src.models.function_id import FunctionClass, FunctionId

STEP = 1e-4
ODE_TOLERANCE = 1e-6
ANGULAR_POINTS = (-2.9, 0.3, 0.9, 1.7, 2.6, 3.0)
RADIAL_POINTS = (0.2, 0.6, 1.1, 1.8, 2.4, 3.0)

# five-point first-difference weights for offsets -2h, -h, 0, h, 2h
_STENCIL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0


class OdeResidualCheck(DiagnosticCheck):
    """Finite-difference second derivative against the equation the function solves.

    Angular functions solve y'' + (a - 2q cos 2x) y = 0 and radial ones
    y'' - (a - 2q cosh 2x) y = 0; modified families use -q. y'' is the
    five-point difference of the returned first derivative, so the check
    ties the derivative to the value. The residual is taken relative to
    |y''| + |(a - 2q cos 2x) y| (cosh for radial families).
    """

    def __init__(
        self,
        function_id: FunctionId,
        q: complex,
        points: Optional[Sequence[float]] = None,
        enabled: bool = True,
    ) -> None:
        super().__init__(f"ode/{function_id.name}/r={function_id.r}", ODE_TOLERANCE, enabled)
        self.function_id = function_id
        self.q = complex(q)
        angular = function_id.function_class is FunctionClass.ANGULAR
        default = ANGULAR_POINTS if angular else RADIAL_POINTS
        self.points = np.asarray(points if points is not None else default, dtype=float)

    def measure(self) -> float:
        fid = self.function_id
        q_eff = -self.q if fid.modified else self.q
        alpha = char_value(fid.parity, fid.r, q_eff).alpha
        x = self.points
        offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * STEP
        grid = x[:, None] + offsets[None, :]
        result = evaluate(fid, self.q, grid.ravel())
        slopes = np.asarray(result.derivative).reshape(grid.shape)
        second = slopes @ _STENCIL / STEP
        y = np.asarray(result.value).reshape(grid.shape)[:, 2]
        if fid.function_class is FunctionClass.ANGULAR:
            potential = alpha - 2 * q_eff * np.cos(2 * x)
            residual = second + potential * y
        else:
            potential = alpha - 2 * q_eff * np.cosh(2 * x)
            residual = second - potential * y
        scale = np.abs(second) + np.abs(potential * y)
        scale = np.where(scale > 0, scale, 1.0)
        return float(np.max(np.abs(residual) / scale))

    def get_description(self) -> str:
        return f"differential equation residual of {self.function_id.name}_{self.function_id.r} at q={self.q}"
