"""Characteristic values a_r(q) and b_r(q) from the tridiagonal recurrence matrices."""

import logging
import math
import warnings
from typing import Tuple

import numpy as np
from scipy import linalg

from src.algorithms.cache import ResultCache, complex_key
from src.models.errors import BranchTrackingError
from src.models.function_id import Parity, validate_order
from src.models.series import CharValue

logger = logging.getLogger(__name__)

MAX_STEP_HALVINGS = 12
# a continuation step is accepted when the runner-up eigenvalue is at
# least this many times further from the prediction than the winner
BRANCH_SEPARATION = 2.0
REFINEMENT_ACCEPT = 1e-8

_cache: ResultCache[CharValue] = ResultCache("char_value")


def sector_first_order(parity: Parity, p: int) -> int:
    """Lowest Fourier order in the (parity, p) sector."""
    return 2 if parity is Parity.ODD and p == 0 else p


def matrix_dimension(r: int, q: complex) -> int:
    """Truncation of the recurrence matrix: enough rows past order r and past sqrt|q|."""
    return max(2 * r + 20, 20 + math.ceil(1.5 * math.sqrt(abs(q))))


def sector_diagonal(parity: Parity, p: int, q: complex, dim: int) -> np.ndarray:
    """Squared Fourier orders, with the +-q boundary term on the p = 1 sectors."""
    orders = sector_first_order(parity, p) + 2 * np.arange(dim)
    diagonal = (orders**2).astype(complex)
    if p == 1:
        diagonal[0] += q if parity is Parity.EVEN else -q
    return diagonal


def sector_matrix(parity: Parity, p: int, q: complex, dim: int) -> np.ndarray:
    """Symmetric form of the three-term recurrence matrix for one sector.

    The even p = 0 sector carries a doubled coupling between orders 0 and 2;
    it is split as sqrt(2) q on both sides, which leaves the spectrum intact.
    """
    q = complex(q)
    matrix = np.diag(sector_diagonal(parity, p, q, dim))
    off = np.full(dim - 1, q)
    if parity is Parity.EVEN and p == 0:
        off[0] = math.sqrt(2.0) * q
    matrix += np.diag(off, 1) + np.diag(off, -1)
    return matrix


def char_value(parity: Parity, r: int, q: complex) -> CharValue:
    """Characteristic value for (parity, r) at complex q.

    Args:
        parity: Even gives a_r, odd gives b_r
        r: Order (r >= 1 for odd)
        q: Complex parameter

    Returns:
        CharValue connected continuously to r**2 at q = 0

    Raises:
        DomainError: If the order is invalid
        BranchTrackingError: If continuation in q cannot follow the branch
    """
    validate_order(parity, r)
    q = complex(q)
    key = (parity.value, r, complex_key(q))
    return _cache.get_or_compute(key, lambda: _compute(parity, r, q))


def clear_cache() -> None:
    """Forget every cached characteristic value."""
    _cache.clear()


def eigenvector(parity: Parity, r: int, q: complex) -> np.ndarray:
    """Dense-solver eigenvector in the natural coefficient scaling.

    The lowest entry is scaled to 1, which is the base case of the
    coefficient recurrences.
    """
    cv = char_value(parity, r, q)
    p = r % 2
    matrix = sector_matrix(parity, p, cv.q, cv.matrix_dim)
    values, vectors = linalg.eig(matrix)
    index = int(np.argmin(np.abs(values - cv.alpha)))
    vector = vectors[:, index].astype(complex)
    if parity is Parity.EVEN and p == 0:
        vector[0] /= math.sqrt(2.0)
    return vector / vector[0]


def _compute(parity: Parity, r: int, q: complex) -> CharValue:
    dim = matrix_dimension(r, q)
    p = r % 2
    index = (r - sector_first_order(parity, p)) // 2
    if q == 0:
        return CharValue(parity=parity, r=r, q=q, alpha=complex(r * r), matrix_dim=dim)

    if q.imag == 0:
        diagonal = sector_diagonal(parity, p, q, dim).real
        off = np.full(dim - 1, q.real)
        if parity is Parity.EVEN and p == 0:
            off[0] *= math.sqrt(2.0)
        alpha0 = complex(
            linalg.eigh_tridiagonal(
                diagonal, off, eigvals_only=True, select="i", select_range=(index, index)
            )[0]
        )
    else:
        alpha0 = _continue_branch(parity, p, index, q, dim)

    alpha = _refine(sector_matrix(parity, p, q, dim), alpha0)
    if q.imag == 0:
        alpha = complex(alpha.real, 0.0)
    logger.debug("char_value(%s, %d, %s) = %s (dim %d)", parity.value, r, q, alpha, dim)
    return CharValue(parity=parity, r=r, q=q, alpha=alpha, matrix_dim=dim)


def _continue_branch(parity: Parity, p: int, index: int, q: complex, dim: int) -> complex:
    """Follow one eigenvalue from q = 0 along the ray t*q, t in [0, 1]."""
    n0 = sector_first_order(parity, p) + 2 * index
    alpha = complex(n0 * n0)
    slope = 0j
    t = 0.0
    base_step = 1.0 / (math.ceil(abs(q) / 2.0) + 1)
    steps = 0
    while t < 1.0:
        h = min(base_step, 1.0 - t)
        for _ in range(MAX_STEP_HALVINGS):
            candidate, clear = _nearest_eigenvalue(parity, p, (t + h) * q, dim, alpha + slope * h)
            if clear:
                break
            h *= 0.5
        else:
            raise BranchTrackingError(
                f"cannot resolve eigenvalue branch of order {n0} near q = {(t + h) * q:.6g}"
            )
        slope = (candidate - alpha) / h
        alpha = candidate
        t = 1.0 if abs(1.0 - (t + h)) < 1e-15 else t + h
        steps += 1
    logger.debug("branch continuation to q = %s took %d steps", q, steps)
    return alpha


def _nearest_eigenvalue(
    parity: Parity, p: int, q: complex, dim: int, predicted: complex
) -> Tuple[complex, bool]:
    values = linalg.eigvals(sector_matrix(parity, p, q, dim))
    distance = np.abs(values - predicted)
    order = np.argsort(distance)
    nearest, runner_up = distance[order[0]], distance[order[1]]
    return complex(values[order[0]]), runner_up > BRANCH_SEPARATION * nearest


def _refine(matrix: np.ndarray, alpha: complex) -> complex:
    """One inverse-iteration step followed by the bilinear Rayleigh quotient."""
    dim = matrix.shape[0]
    shift = alpha + 1e-13 * max(1.0, abs(alpha))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", linalg.LinAlgWarning)
        factors = linalg.lu_factor(matrix - shift * np.eye(dim))
        vector = linalg.lu_solve(factors, np.ones(dim, dtype=complex))
    if not np.all(np.isfinite(vector)):
        return alpha
    vector /= vector[np.argmax(np.abs(vector))]
    weight = vector @ vector
    if abs(weight) < 1e-8:
        return alpha
    refined = complex(vector @ (matrix @ vector) / weight)
    if abs(refined - alpha) > REFINEMENT_ACCEPT * max(1.0, abs(alpha)):
        return alpha
    return refined
