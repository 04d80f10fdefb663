"""Fourier coefficients of the first- and second-kind angular Mathieu functions.

First-kind coefficients come from ratio recurrences run upward from the
lowest order and downward (as a continued fraction) from the truncation
point, meeting at the order-r coefficient. Second-kind coefficients are a
particular solution of the inhomogeneous recurrence, recursed downward,
with the homogeneous part removed through rho.
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from src.algorithms.cache import ResultCache, complex_key
from src.algorithms.characteristic import char_value
from src.models.errors import ConvergenceError
from src.models.function_id import Parity
from src.models.series import CoefficientTable, SecondKindTable, SeriesSpec

logger = logging.getLogger(__name__)

SMALL_Q = 1e-8
TAIL_TOLERANCE = 1e-14
MAX_TERMS = 4000
RHO_TOLERANCE = 1e-9
RHO_EXTRA_TERMS = 8
WRONSKIAN = 2.0 / math.pi

_first_kind: ResultCache[CoefficientTable] = ResultCache("fourier_coeffs")
_second_kind: ResultCache[SecondKindTable] = ResultCache("second_kind_coeffs")


def default_truncation(r: int, q: complex) -> int:
    """Initial truncation index M for order r at q."""
    return max(r // 2 + 12, math.ceil(0.75 * math.sqrt(abs(q))) + 12)


def fourier_coeffs(
    parity: Parity, r: int, q: complex, min_terms: int = 0, meet_shift: int = 0
) -> CoefficientTable:
    """Normalized A (even) or B (odd) coefficients for order r at parameter q.

    Args:
        parity: Even (ce) or odd (se)
        r: Order of the function
        q: Complex parameter
        min_terms: Lower bound on the truncation index M
        meet_shift: Move the point where the upward and downward recursions
            meet by this many coefficients

    Returns:
        CoefficientTable normalized so that the function has L2 norm pi

    Raises:
        DomainError: If the order is invalid
        ConvergenceError: If the tail does not decay before MAX_TERMS
    """
    q = complex(q)
    spec = SeriesSpec.create(parity, r, q)
    key = (parity.value, r, complex_key(q), min_terms, meet_shift)
    return _first_kind.get_or_compute(key, lambda: _build_first_kind(spec, q, min_terms, meet_shift))


def second_kind_coeffs(parity: Parity, r: int, q: complex) -> SecondKindTable:
    """G (even) or H (odd) coefficients of Fe_r / Fo_r, rescaled to W = 2/pi.

    Raises:
        DomainError: If the order is invalid
        ConvergenceError: If rho does not settle before MAX_TERMS
    """
    q = complex(q)
    spec = SeriesSpec.create(parity, r, q)
    key = (parity.value, r, complex_key(q))
    return _second_kind.get_or_compute(key, lambda: _build_second_kind(spec, q))


def clear_caches() -> None:
    """Forget every cached first- and second-kind table."""
    _first_kind.clear()
    _second_kind.clear()


def sector_orders(spec: SeriesSpec, count: int) -> np.ndarray:
    """The first count Fourier orders of a sector."""
    return spec.first_order + 2 * np.arange(count)


def recurrence_residual(table: CoefficientTable) -> np.ndarray:
    """Residual of every recurrence row except the last, relative to the row's largest term."""
    spec, q, alpha = table.spec, table.q, table.alpha
    c = table.coeffs
    n2 = table.orders.astype(float) ** 2
    below = np.concatenate([[0j], c[:-1]])
    above = np.concatenate([c[1:], [0j]])
    if spec.parity is Parity.EVEN and spec.p == 0 and len(c) > 1:
        below[1] = 2.0 * c[0]
    diagonal = alpha - n2 + 0j
    diagonal[0] -= _boundary_shift(spec, q)
    rows = diagonal * c - q * (below + above)
    scale = np.maximum.reduce([np.abs(diagonal * c), np.abs(q * below), np.abs(q * above)])
    scale = np.where(scale > 0, scale, 1.0)
    return (np.abs(rows) / scale)[:-1]


def _boundary_shift(spec: SeriesSpec, q: complex) -> complex:
    """Extra diagonal term on the lowest row of the p = 1 sectors."""
    if spec.p == 0:
        return 0j
    return q if spec.parity is Parity.EVEN else -q


def _build_first_kind(spec: SeriesSpec, q: complex, min_terms: int, meet_shift: int) -> CoefficientTable:
    terms = max(default_truncation(spec.r, q), min_terms)
    if abs(q) < SMALL_Q:
        return _trig_limit(spec, q, terms)

    alpha = char_value(spec.parity, spec.r, q).alpha
    while True:
        orders = sector_orders(spec, terms + 1)
        raw, meet = _solve_ratios(spec, q, alpha, orders, spec.leading_index + meet_shift)
        table = _normalize(spec, q, alpha, orders, raw, meet)
        if table.tail_ratio() <= TAIL_TOLERANCE:
            logger.debug("fourier_coeffs %r converged, meet at %d", table, meet)
            return table
        if terms >= MAX_TERMS:
            raise ConvergenceError(
                f"coefficient tail of order {spec.r} at q = {q} did not decay below "
                f"{TAIL_TOLERANCE:g} (tail ratio {table.tail_ratio():.3g})",
                attempted=terms,
            )
        terms = min(MAX_TERMS, math.ceil(1.5 * terms))


def _trig_limit(spec: SeriesSpec, q: complex, terms: int) -> CoefficientTable:
    coeffs = np.zeros(terms + 1, dtype=complex)
    norm = math.sqrt(2.0) if spec.r == 0 else 1.0
    coeffs[spec.leading_index] = math.sqrt(0.5) if spec.r == 0 else 1.0
    return CoefficientTable(
        spec=spec,
        q=q,
        alpha=complex(spec.r * spec.r),
        orders=sector_orders(spec, terms + 1),
        coeffs=coeffs,
        norm=complex(norm),
        meet_index=spec.leading_index,
    )


def _meet_candidates(preferred: int, last: int) -> Sequence[int]:
    candidates = [preferred, preferred + 1, preferred - 1, preferred + 2, preferred - 2]
    return [k for k in candidates if 0 <= k < last]


def _solve_ratios(
    spec: SeriesSpec, q: complex, alpha: complex, orders: np.ndarray, preferred_meet: int
) -> Tuple[np.ndarray, int]:
    for meet in _meet_candidates(preferred_meet, len(orders) - 1):
        raw = _ratio_chain(spec, q, alpha, orders, meet)
        if raw is not None:
            if meet != preferred_meet:
                logger.debug("ratio chain hit a zero, meet index moved to %d", meet)
            return raw, meet
    raise ConvergenceError(
        f"ratio recurrences for order {spec.r} at q = {q} break down near every meet point",
        attempted=len(orders) - 1,
    )


def _ratio_chain(
    spec: SeriesSpec, q: complex, alpha: complex, orders: np.ndarray, meet: int
) -> Optional[np.ndarray]:
    """Unnormalized coefficients with the lowest one equal to 1, or None on a zero ratio."""
    last = len(orders) - 1
    n2 = orders.astype(float) ** 2
    doubled = spec.parity is Parity.EVEN and spec.p == 0
    lowest_diagonal = n2[0] + _boundary_shift(spec, q)

    c = np.zeros(last + 1, dtype=complex)
    c[0] = 1.0
    ratio = 0j
    for k in range(meet):
        if k == 0:
            ratio = (alpha - lowest_diagonal) / q
        elif k == 1 and doubled:
            ratio = (alpha - n2[1]) / q - 2.0 / ratio
        else:
            ratio = (alpha - n2[k]) / q - 1.0 / ratio
        if ratio == 0 or not np.isfinite(ratio):
            return None
        c[k + 1] = c[k] * ratio

    downward = np.zeros(last, dtype=complex)
    ratio = 0j
    for k in range(last - 1, meet - 1, -1):
        denominator = alpha - n2[k + 1] - q * ratio
        if denominator == 0 or not np.isfinite(denominator):
            return None
        ratio = (2.0 if doubled and k == 0 else 1.0) * q / denominator
        downward[k] = ratio
    for k in range(meet, last):
        c[k + 1] = c[k] * downward[k]

    if not np.all(np.isfinite(c)):
        return None
    return c


def _normalize(
    spec: SeriesSpec,
    q: complex,
    alpha: complex,
    orders: np.ndarray,
    raw: np.ndarray,
    meet: int,
) -> CoefficientTable:
    peak = np.max(np.abs(raw))
    scaled = raw / peak
    square_sum = np.sum(scaled * scaled)
    if spec.parity is Parity.EVEN and spec.p == 0:
        square_sum += scaled[0] * scaled[0]
    norm = np.sqrt(complex(square_sum))
    return CoefficientTable(
        spec=spec,
        q=q,
        alpha=alpha,
        orders=orders,
        coeffs=spec.delta * scaled / norm,
        norm=complex(norm * peak),
        meet_index=meet,
    )


def _build_second_kind(spec: SeriesSpec, q: complex) -> SecondKindTable:
    if abs(q) < SMALL_Q:
        return _second_kind_trig_limit(spec, q)

    terms = default_truncation(spec.r, q)
    while True:
        table = fourier_coeffs(spec.parity, spec.r, q, min_terms=terms)
        orders, coeffs, rho = _particular_solution(table)
        wider = fourier_coeffs(spec.parity, spec.r, q, min_terms=table.M + RHO_EXTRA_TERMS)
        rho_wider = _particular_solution(wider)[2]
        if abs(rho - rho_wider) <= RHO_TOLERANCE * max(1.0, abs(rho)):
            break
        logger.debug("rho moved by %.3g at M=%d, rebuilding larger", abs(rho - rho_wider), table.M)
        if table.M >= MAX_TERMS:
            raise ConvergenceError(
                f"second-kind normalization of order {spec.r} at q = {q} did not settle",
                attempted=table.M,
            )
        terms = math.ceil(1.5 * table.M)

    return _rescale(spec, q, table, orders, coeffs, rho, theta_weight=1.0)


def _particular_solution(table: CoefficientTable) -> Tuple[np.ndarray, np.ndarray, complex]:
    """Orders, G/H coefficients and rho for one first-kind table.

    The particular solution (Q for even, T for odd) is recursed downward from
    zero above the truncation. ``work[j]`` holds order ``first - 2 + 2j``.
    """
    spec, q, alpha = table.spec, table.q, table.alpha
    orders = table.orders
    coeffs = table.coeffs
    last = len(orders) - 1
    even = spec.parity is Parity.EVEN
    source_sign = -1.0 if even else 1.0

    work = np.zeros(last + 3, dtype=complex)
    lowest_row = 1 if (even and spec.p == 0) else 0
    for k in range(last, lowest_row - 1, -1):
        n = orders[k]
        j = k + 1
        work[j - 1] = ((alpha - n * n) * work[j] + source_sign * 2.0 * n * coeffs[k]) / q - work[j + 1]

    def particular(order: int) -> complex:
        return complex(work[(order - spec.first_order) // 2 + 1])

    if even and spec.p == 0:
        rho = particular(0) / (2.0 * table.coefficient(0))
    elif even:
        rho = (particular(-1) + particular(1)) / (2.0 * table.coefficient(1))
    elif spec.p == 0:
        constant = particular(0) / 2.0
        rho = (particular(2) - alpha * constant / q) / table.coefficient(2)
        solution = work[1 : last + 2] - rho * coeffs
        return (
            np.concatenate([[0], orders]),
            np.concatenate([[constant], solution]),
            rho,
        )
    else:
        rho = (particular(1) - particular(-1)) / (2.0 * table.coefficient(1))

    return orders, work[1 : last + 2] - rho * coeffs, rho


def _rescale(
    spec: SeriesSpec,
    q: complex,
    table: CoefficientTable,
    orders: np.ndarray,
    coeffs: np.ndarray,
    rho: complex,
    theta_weight: float,
) -> SecondKindTable:
    """Fix the prefactor from the Wronskian at theta = 0 and compare with the printed one."""
    a = table.coeffs
    n = table.orders.astype(float)
    if spec.parity is Parity.EVEN:
        at_zero = complex(np.sum(a))
        wronskian = at_zero * (theta_weight * at_zero + complex(np.sum(orders * coeffs)))
        sums: Dict[str, complex] = {
            "alpha_1": at_zero,
            "alpha_2": complex(np.sum(a * a)),
        }
        with np.errstate(divide="ignore", invalid="ignore"):
            printed = (
                2.0
                * spec.delta
                * np.sqrt(sums["alpha_2"] + 1 - spec.p)
                / (math.pi * (1.0 + sums["alpha_1"]))
                / (sums["alpha_1"] + complex(np.sum(orders * coeffs)))
            )
    else:
        slope_at_zero = complex(np.sum(n * a))
        wronskian = -slope_at_zero * complex(np.sum(coeffs))
        sums = {
            "alpha_1_1": slope_at_zero,
            "alpha_2_0": complex(np.sum(a * a)),
        }
        with np.errstate(divide="ignore", invalid="ignore"):
            base = 2 - spec.p + sums["alpha_1_1"]
            printed = (
                2.0
                * spec.delta
                * np.sqrt(sums["alpha_2_0"])
                / (math.pi * base)
                / (base + complex(np.sum(coeffs)) / sums["alpha_1_1"])
            )

    scale = WRONSKIAN / wronskian
    return SecondKindTable(
        spec=spec,
        q=q,
        orders=np.asarray(orders),
        coeffs=np.asarray(coeffs, dtype=complex),
        rho=complex(rho),
        alpha_sums=sums,
        scale=complex(scale),
        theta_weight=theta_weight,
        literal_discrepancy=complex(printed / scale),
        first_kind=table,
    )


def _second_kind_trig_limit(spec: SeriesSpec, q: complex) -> SecondKindTable:
    """q -> 0 limits: (2 sqrt2/pi) theta, (2/(pi r)) sin r theta, -(2/(pi r)) cos r theta."""
    table = fourier_coeffs(spec.parity, spec.r, q)
    if spec.parity is Parity.ODD and spec.p == 0:
        orders = np.concatenate([[0], table.orders])
    else:
        orders = table.orders
    coeffs = np.zeros(len(orders), dtype=complex)
    if spec.r == 0:
        return _rescale(spec, q, table, orders, coeffs, 0j, theta_weight=1.0)
    coeffs[int(np.flatnonzero(orders == spec.r)[0])] = 1.0
    return _rescale(spec, q, table, orders, coeffs, 0j, theta_weight=0.0)
