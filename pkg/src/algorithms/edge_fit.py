"""Weighted polynomial fit of E/E_pfa for the edge coefficients beta and gamma."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.models.casimir_config import PFA_COEFFICIENT, EnergyCurve
from src.models.errors import FitError

logger = logging.getLogger(__name__)

MIN_POINTS = 6
CONDITION_LIMIT = 1e12
ERROR_FLOOR = 1e-6
DEFAULT_FIT_RANGE = (2.0, 10.0)


@dataclass(frozen=True)
class FitReport:
    """Outcome of an edge-coefficient fit.

    The model is E/E_pfa = c0 + c1 x + c2 x^2 with x = H / (2d), so that
    beta = -c1 (pi^2/720) / 2 and gamma = -c2 (pi^2/720).
    """

    beta: float
    gamma: float
    sigma_beta: float
    sigma_gamma: float
    intercept: float
    sigma_intercept: float
    intercept_free: bool
    n_points: int
    residual_rms: float
    reduced_chi2: float
    condition_number: float
    fit_range: Tuple[float, float]

    def to_dict(self) -> dict:
        """Coefficients, uncertainties and fit diagnostics as a plain mapping."""
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "sigma_beta": self.sigma_beta,
            "sigma_gamma": self.sigma_gamma,
            "intercept": self.intercept,
            "sigma_intercept": self.sigma_intercept,
            "intercept_free": self.intercept_free,
            "n_points": self.n_points,
            "residual_rms": self.residual_rms,
            "reduced_chi2": self.reduced_chi2,
            "condition_number": self.condition_number,
            "fit_range": list(self.fit_range),
        }


def fit_edge_coefficients(
    curve: EnergyCurve,
    fit_range: Tuple[float, float] = DEFAULT_FIT_RANGE,
    intercept_free: bool = True,
    h_max: Optional[float] = None,
) -> Tuple[float, float, FitReport]:
    """Fit beta and gamma to the points of curve with 2d/H inside fit_range.

    Args:
        curve: Energy records for one strip width
        fit_range: Inclusive bounds on 2d/H
        intercept_free: Fit c0 too; otherwise it is fixed to 1
        h_max: Optional extra upper bound on H

    Returns:
        (beta, gamma, report)

    Raises:
        FitError: If fewer than 6 points remain or the design is ill-conditioned
    """
    low, high = sorted(fit_range)
    selected = [
        record
        for record in curve.records
        if low <= 2.0 * curve.d / record.H <= high and (h_max is None or record.H <= h_max)
    ]
    if len(selected) < MIN_POINTS:
        raise FitError(
            f"need at least {MIN_POINTS} points with 2d/H in [{low}, {high}], found {len(selected)}"
        )

    x = np.array([record.H for record in selected]) / (2.0 * curve.d)
    ratio = np.array([record.ratio_pfa for record in selected])
    sigma = _weights(np.array([record.est_error for record in selected]))

    if intercept_free:
        design = np.column_stack([np.ones_like(x), x, x**2])
        target = ratio
    else:
        design = np.column_stack([x, x**2])
        target = ratio - 1.0
    weighted_design = design / sigma[:, None]
    weighted_target = target / sigma

    condition = float(np.linalg.cond(weighted_design))
    if not condition <= CONDITION_LIMIT:
        raise FitError(
            f"design matrix condition number {condition:.3g} exceeds {CONDITION_LIMIT:.0e}; widen the fit range"
        )

    coefficients, _, _, _ = np.linalg.lstsq(weighted_design, weighted_target, rcond=None)
    residuals = weighted_target - weighted_design @ coefficients
    dof = len(selected) - design.shape[1]
    reduced_chi2 = float(residuals @ residuals / dof) if dof > 0 else 0.0
    covariance = np.linalg.inv(weighted_design.T @ weighted_design) * (reduced_chi2 if dof > 0 else 1.0)
    errors = np.sqrt(np.abs(np.diag(covariance)))

    if intercept_free:
        intercept, sigma_intercept = float(coefficients[0]), float(errors[0])
        c1, c2, sigma_c1, sigma_c2 = coefficients[1], coefficients[2], errors[1], errors[2]
        logger.info("fitted intercept deviates from 1 by %.3g", intercept - 1.0)
    else:
        intercept, sigma_intercept = 1.0, 0.0
        c1, c2, sigma_c1, sigma_c2 = coefficients[0], coefficients[1], errors[0], errors[1]

    unweighted = target - design @ coefficients
    residual_rms = float(np.sqrt(np.mean(unweighted**2)))
    if np.max([record.est_error for record in selected]) > residual_rms > 0:
        logger.warning("curve error estimates exceed the fit residual scale %.3g", residual_rms)

    report = FitReport(
        beta=float(-c1 * PFA_COEFFICIENT / 2.0),
        gamma=float(-c2 * PFA_COEFFICIENT),
        sigma_beta=float(sigma_c1 * PFA_COEFFICIENT / 2.0),
        sigma_gamma=float(sigma_c2 * PFA_COEFFICIENT),
        intercept=intercept,
        sigma_intercept=sigma_intercept,
        intercept_free=intercept_free,
        n_points=len(selected),
        residual_rms=residual_rms,
        reduced_chi2=reduced_chi2,
        condition_number=condition,
        fit_range=(low, high),
    )
    return report.beta, report.gamma, report


def synthetic_ratio(H: float, d: float, beta: float, gamma: float) -> float:
    """E/E_pfa = 1 - 2 beta H / (c 2d) - gamma H^2 / (c (2d)^2) with c = pi^2/720."""
    x = H / (2.0 * d)
    return 1.0 - 2.0 * beta * x / PFA_COEFFICIENT - gamma * x**2 / PFA_COEFFICIENT


def _weights(errors: np.ndarray) -> np.ndarray:
    if not np.any(errors > 0):
        return np.ones_like(errors)
    return np.maximum(np.abs(errors), ERROR_FLOOR * np.max(np.abs(errors)))
