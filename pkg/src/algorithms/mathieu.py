"""Evaluation surface for the angular, radial and modified radial Mathieu functions.

Radial functions are sums of Bessel-function products with arguments
sqrt(q) e^{-mu} and sqrt(q) e^{mu}; modified ones use kappa = -i sqrt(q) in
place of sqrt(q), which makes Ie_r(-q, mu) = i^{-r} Je_r(q, mu) and
Ke_r(-q, mu) = i^{r+1} (pi/2) He_r(q, mu) hold as written. Angular
functions use their Fourier series for real theta and the radial series
times a joining factor otherwise.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from src.algorithms.bessel import bessel_batch
from src.algorithms.cache import ResultCache, complex_key
from src.algorithms.coefficients import fourier_coeffs, second_kind_coeffs
from src.models.bessel_batch import BesselBatch, BesselFamily
from src.models.errors import BesselOverflowError, ConvergenceError, DomainError
from src.models.function_id import (
    ComplexLike,
    EvalResult,
    FunctionClass,
    FunctionId,
    Kind,
    Parity,
    validate_order,
)
from src.models.series import CoefficientTable

logger = logging.getLogger(__name__)

SMALL_Q_TRIG = 1e-6
SMALL_Q_RADIAL = 1e-2
SERIES_TOLERANCE = 1e-14
COEFFICIENT_FLOOR = 1e-18
# sums whose terms exceed the result by more than this are treated as cancelling
CANCELLATION_LIMIT = 1e4
JOINING_POINTS = (0.0, math.pi / 2, math.pi / 4, 0.3)
WRONSKIAN_TOLERANCE = 1e-9
CONTINUATION_STEP = 0.5
MAX_CONTINUATION_STEPS = 24


@dataclass(frozen=True)
class _ProductForm:
    """One Bessel-product series: inner(x1) * outer(x2) pairs and their signs."""

    inner: BesselFamily
    outer: BesselFamily
    alternate: bool
    phase: bool
    antisymmetric: bool
    reflect_with_p: bool = False

    def second_sign(self, p: int) -> float:
        """Sign relating the coefficient of order -n to that of order n."""
        sign = -1.0 if self.antisymmetric else 1.0
        if self.reflect_with_p and p:
            sign = -sign
        return sign


_J, _Y, _I, _K = BesselFamily.J, BesselFamily.Y, BesselFamily.I, BesselFamily.K

_FORMS: Dict[Tuple[Parity, str], _ProductForm] = {
    (Parity.EVEN, "J"): _ProductForm(_J, _J, alternate=True, phase=True, antisymmetric=False),
    (Parity.ODD, "J"): _ProductForm(_J, _J, alternate=True, phase=True, antisymmetric=True),
    (Parity.EVEN, "Y"): _ProductForm(_J, _Y, alternate=True, phase=True, antisymmetric=False),
    (Parity.ODD, "Y"): _ProductForm(_J, _Y, alternate=True, phase=True, antisymmetric=True),
    (Parity.EVEN, "I"): _ProductForm(_I, _I, alternate=False, phase=False, antisymmetric=False),
    (Parity.ODD, "I"): _ProductForm(_I, _I, alternate=False, phase=False, antisymmetric=True),
    (Parity.EVEN, "K"): _ProductForm(
        _I, _K, alternate=True, phase=True, antisymmetric=False, reflect_with_p=True
    ),
    (Parity.ODD, "K"): _ProductForm(
        _I, _K, alternate=True, phase=True, antisymmetric=True, reflect_with_p=True
    ),
}


@dataclass(frozen=True)
class SeriesValue:
    """A product-series sum before and after removing Bessel scaling.

    ``raw_value``/``raw_derivative`` are the sums with scaled Bessel factors;
    multiplying by ``unscale`` gives the function. Magnitudes refer to the
    raw sums, so conditioning survives underflow of the unscaling factor.
    """

    value: ComplexLike
    derivative: ComplexLike
    raw_value: ComplexLike
    raw_derivative: ComplexLike
    unscale: ComplexLike
    magnitude: ComplexLike
    slope_magnitude: ComplexLike

    @property
    def condition(self) -> np.ndarray:
        """Ratio of the summed term magnitudes to the magnitude of the sum."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.magnitude) / np.abs(self.raw_value)

    @property
    def slope_condition(self) -> np.ndarray:
        """Same ratio for the derivative series."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.abs(self.slope_magnitude) / np.abs(self.raw_derivative)


@dataclass(frozen=True)
class JoiningFactor:
    """Ratio between angular and radial normalizations.

    Attributes:
        value: Joining factor j with X(q, theta) = j * R(q, -i theta)
        theta: Real point where the two were matched
        shifted: True when theta = 0 was too ill-conditioned to use
    """

    value: complex
    theta: float
    shifted: bool


@dataclass(frozen=True)
class WronskianReport:
    """Outcome of a Wronskian sweep over a grid of arguments."""

    pair: str
    parity: Parity
    r: int
    q: complex
    grid: np.ndarray
    values: np.ndarray
    expected: float
    max_deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def __repr__(self) -> str:
        """Pass/fail, pair, order, parameter and deviation, for debugging."""
        status = "PASS" if self.passed else "FAIL"
        return (
            f"WronskianReport({status}, {self.pair}, {self.parity.value}, r={self.r}, "
            f"q={self.q}, max_deviation={self.max_deviation:.3g})"
        )


_joining_cache: ResultCache[JoiningFactor] = ResultCache("joining_factor")


def principal_sqrt(q: complex) -> complex:
    """Principal square root, with -0.0 parts treated as +0.0."""
    q = complex(q)
    return cmath.sqrt(complex(q.real + 0.0, q.imag + 0.0))


def wronskian(first: EvalResult, second: EvalResult) -> ComplexLike:
    """W(f, g) = f g' - f' g from two evaluations at the same arguments."""
    return first.value * second.derivative - first.derivative * second.value


def angular_first(parity: Parity, r: int, q: complex, theta: ComplexLike) -> EvalResult:
    """ce_r(q, theta) or se_r(q, theta) and its theta-derivative.

    Args:
        parity: Even (ce) or odd (se)
        r: Order
        q: Complex parameter
        theta: Complex argument, scalar or array

    Returns:
        EvalResult shaped like theta

    Raises:
        DomainError: If the order is invalid
    """
    validate_order(parity, r)
    q = complex(q)
    theta_arr = np.asarray(theta, dtype=complex)

    if abs(q) < SMALL_Q_TRIG:
        value, derivative = _trig_limit(parity, r, theta_arr)
    elif abs(q) < SMALL_Q_RADIAL or np.any(theta_arr.imag != 0):
        factor = joining_factor(parity, r, q)
        table = fourier_coeffs(parity, r, q)
        radial_part = _product_series(table, _FORMS[(parity, "J")], principal_sqrt(q), -1j * theta_arr)
        value = factor * radial_part.value
        derivative = -1j * factor * radial_part.derivative
    else:
        table = fourier_coeffs(parity, r, q)
        value, derivative, _ = _fourier_sum(table, theta_arr.real)
    return EvalResult(value=_like(theta_arr, value), derivative=_like(theta_arr, derivative))


def angular_second(parity: Parity, r: int, q: complex, theta: ComplexLike) -> EvalResult:
    """Fe_r(q, theta) or Fo_r(q, theta), normalized to a Wronskian of 2/pi with ce_r / se_r.

    Raises:
        DomainError: If theta is not real or the order is invalid
    """
    validate_order(parity, r)
    theta_arr = np.asarray(theta)
    if np.iscomplexobj(theta_arr):
        if np.any(theta_arr.imag != 0):
            raise DomainError("second-kind angular functions are evaluated at real theta only")
        theta_arr = theta_arr.real
    theta_arr = theta_arr.astype(float)

    table = second_kind_coeffs(parity, r, complex(q))
    first, first_slope, _ = _fourier_sum(table.first_kind, theta_arr)
    n = table.orders.astype(float)
    phase = np.multiply.outer(n, theta_arr)
    c = _expand(table.coeffs, theta_arr.ndim)
    nc = _expand(n * table.coeffs, theta_arr.ndim)
    if parity is Parity.EVEN:
        series, series_slope = np.sum(c * np.sin(phase), axis=0), np.sum(nc * np.cos(phase), axis=0)
    else:
        series, series_slope = np.sum(c * np.cos(phase), axis=0), -np.sum(nc * np.sin(phase), axis=0)
    w = table.theta_weight
    value = table.scale * (w * theta_arr * first + series)
    derivative = table.scale * (w * (first + theta_arr * first_slope) + series_slope)
    return EvalResult(value=_like(theta_arr, value), derivative=_like(theta_arr, derivative))


def radial(parity: Parity, kind: Kind, r: int, q: complex, mu: ComplexLike) -> EvalResult:
    """Je/Jo (first), Ye/Yo (second) or He/Ho (third kind) and their mu-derivatives.

    Raises:
        DomainError: If q = 0 or the order is invalid
        BesselOverflowError: If the series is not representable
    """
    validate_order(parity, r)
    q = _nonzero(q)
    mu_arr = np.asarray(mu, dtype=complex)
    table = fourier_coeffs(parity, r, q)
    root = principal_sqrt(q)
    if kind is Kind.FIRST:
        result = _radial_sum(table, _FORMS[(parity, "J")], root, mu_arr)
        return EvalResult(_like(mu_arr, result.value), _like(mu_arr, result.derivative))
    second = _radial_sum(table, _FORMS[(parity, "Y")], root, mu_arr)
    if kind is Kind.SECOND:
        return EvalResult(_like(mu_arr, second.value), _like(mu_arr, second.derivative))
    first = _radial_sum(table, _FORMS[(parity, "J")], root, mu_arr)
    return EvalResult(
        _like(mu_arr, first.value + 1j * second.value),
        _like(mu_arr, first.derivative + 1j * second.derivative),
    )


def radial_modified(parity: Parity, kind: Kind, r: int, q: complex, mu: ComplexLike) -> EvalResult:
    """Ie_r(-q, mu) / Io_r (first kind) or Ke_r(-q, mu) / Ko_r (third kind).

    ``q`` is the parameter of the ordinary functions these continue; the
    Casimir path passes q = -(d p)^2 / 4 and obtains the decaying solutions
    of positive parameter. Decaying sums that cancel badly are evaluated at a
    larger mu and continued inward with an adaptive ODE integrator.

    Raises:
        DomainError: For kind SECOND, q = 0 or an invalid order
        BesselOverflowError: If the series is not representable
        ConvergenceError: If no well-conditioned starting point is found
    """
    validate_order(parity, r)
    if kind is Kind.SECOND:
        raise DomainError("modified radial functions are exposed as first and third kind only")
    q = _nonzero(q)
    mu_arr = np.asarray(mu, dtype=complex)
    table = fourier_coeffs(parity, r, q)
    root = -1j * principal_sqrt(q)
    if kind is Kind.FIRST:
        result = _radial_sum(table, _FORMS[(parity, "I")], root, mu_arr)
        return EvalResult(_like(mu_arr, result.value), _like(mu_arr, result.derivative))

    form = _FORMS[(parity, "K")]
    result = _radial_sum(table, form, root, mu_arr)
    value = np.array(result.value, dtype=complex, ndmin=1).ravel()
    derivative = np.array(result.derivative, dtype=complex, ndmin=1).ravel()
    condition = np.array(result.condition, ndmin=1).ravel()
    flat_mu = np.atleast_1d(mu_arr).ravel()
    for index in np.flatnonzero(~(condition <= CANCELLATION_LIMIT)):
        if flat_mu[index].imag != 0:
            continue
        value[index], derivative[index] = _continue_inward(table, form, root, flat_mu[index].real)
    shape = mu_arr.shape
    return EvalResult(_like(mu_arr, value.reshape(shape)), _like(mu_arr, derivative.reshape(shape)))


def radial_profiles(channels: Sequence[Tuple[Parity, int]], q: complex, mu: np.ndarray) -> np.ndarray:
    """First-kind radial functions for several (parity, r) channels on one mu grid.

    The Bessel batches are computed once for the largest order any channel needs.

    Returns:
        Array of shape (len(channels),) + mu.shape
    """
    q = _nonzero(q)
    mu_arr = np.asarray(mu, dtype=complex)
    root = principal_sqrt(q)
    tables = [fourier_coeffs(parity, r, q) for parity, r in channels]
    trimmed = [_trim(table) for table in tables]
    n_max = max(_orders_needed(table, count)[2] for table, count in zip(tables, trimmed))
    x1, x2 = root * np.exp(-mu_arr), root * np.exp(mu_arr)
    batches = (bessel_batch(_J, x1, n_max), bessel_batch(_J, x2, n_max))
    rows = [
        _product_series(table, _FORMS[(table.spec.parity, "J")], root, mu_arr, batches=batches).value
        for table in tables
    ]
    return np.array(rows, dtype=complex)


def joining_factor(parity: Parity, r: int, q: complex) -> complex:
    """Factor j with ce_r(q, theta) = j Je_r(q, -i theta), or se_r = j Jo_r(q, -i theta).

    For the odd family the derivative is taken with respect to theta, so
    j = se_r'(q, 0) / (-i Jo_r'(q, 0)).
    """
    return joining_details(parity, r, q).value


def joining_details(parity: Parity, r: int, q: complex) -> JoiningFactor:
    """Cached joining factor for order r at q, with its diagnostics."""
    validate_order(parity, r)
    q = complex(q)
    key = (parity.value, r, complex_key(q))
    return _joining_cache.get_or_compute(key, lambda: _match(parity, r, q))


def joining_factor_at(parity: Parity, r: int, q: complex, theta: float, use_derivative: bool = False) -> complex:
    """Matching ratio at an arbitrary real point, by values or by theta-derivatives."""
    table = fourier_coeffs(parity, r, complex(q))
    return _ratio_at(table, principal_sqrt(q), theta, use_derivative)[0]


def wronskian_check(
    parity: Parity,
    r: int,
    q: complex,
    grid: Sequence[float],
    pair: str = "radial",
) -> WronskianReport:
    """Wronskian of a first/second-kind pair over a grid of arguments.

    Args:
        pair: ``radial`` (Je, Ye) with constant 2/pi, ``angular`` (ce, Fe)
            with constant 2/pi, or ``modified`` (Ie, Ke) with constant -1

    Returns:
        WronskianReport; it passes when every value is within 1e-9 of the
        constant, measured relative to the larger of the constant and the two
        products f g' and f' g whose difference forms the Wronskian
    """
    grid_arr = np.asarray(grid)
    if pair == "radial":
        first = radial(parity, Kind.FIRST, r, q, grid_arr)
        second = radial(parity, Kind.SECOND, r, q, grid_arr)
        expected = 2.0 / math.pi
    elif pair == "angular":
        first = angular_first(parity, r, q, grid_arr)
        second = angular_second(parity, r, q, grid_arr)
        expected = 2.0 / math.pi
    elif pair == "modified":
        first = radial_modified(parity, Kind.FIRST, r, q, grid_arr)
        second = radial_modified(parity, Kind.THIRD, r, q, grid_arr)
        expected = -1.0
    else:
        raise DomainError(f"unknown Wronskian pair '{pair}'")
    values = np.atleast_1d(np.asarray(wronskian(first, second), dtype=complex))
    products = np.maximum(
        np.abs(np.atleast_1d(first.value * second.derivative)),
        np.abs(np.atleast_1d(first.derivative * second.value)),
    )
    scale = np.maximum(products, abs(expected))
    deviation = float(np.max(np.abs(values - expected) / scale))
    return WronskianReport(
        pair=pair,
        parity=parity,
        r=r,
        q=complex(q),
        grid=grid_arr,
        values=values,
        expected=expected,
        max_deviation=deviation,
        tolerance=WRONSKIAN_TOLERANCE,
    )


def evaluate(function_id: FunctionId, q: complex, arg: ComplexLike) -> EvalResult:
    """Evaluate any of the sixteen families, each at its own parameter q.

    Modified angular functions are the ordinary ones at -q; modified radial
    functions Ie_r(q, mu) etc. are the continuations of the ordinary radial
    functions of parameter -q.
    """
    q = complex(q)
    parity, r = function_id.parity, function_id.r
    if function_id.function_class is FunctionClass.ANGULAR:
        q_eff = -q if function_id.modified else q
        if function_id.kind is Kind.FIRST:
            return angular_first(parity, r, q_eff, arg)
        return angular_second(parity, r, q_eff, arg)
    if function_id.modified:
        return radial_modified(parity, function_id.kind, r, -q, arg)
    return radial(parity, function_id.kind, r, q, arg)


def _nonzero(q: complex) -> complex:
    q = complex(q)
    if q == 0:
        raise DomainError("radial Mathieu functions are undefined at q = 0")
    return q


def _like(reference: np.ndarray, values: ComplexLike) -> ComplexLike:
    if np.ndim(reference) == 0:
        return complex(np.asarray(values).reshape(()))
    return np.asarray(values, dtype=complex)


def _expand(column: np.ndarray, ndim: int) -> np.ndarray:
    return np.asarray(column).reshape((-1,) + (1,) * ndim)


def _trig_limit(parity: Parity, r: int, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if parity is Parity.EVEN:
        if r == 0:
            return np.full_like(theta, math.sqrt(0.5)), np.zeros_like(theta)
        return np.cos(r * theta), -r * np.sin(r * theta)
    return np.sin(r * theta), r * np.cos(r * theta)


def _fourier_sum(table: CoefficientTable, theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value, derivative and summed term magnitude of the Fourier series at real theta."""
    theta = np.asarray(theta, dtype=float)
    n = table.orders.astype(float)
    phase = np.multiply.outer(n, theta)
    c = _expand(table.coeffs, theta.ndim)
    nc = _expand(n * table.coeffs, theta.ndim)
    if table.spec.parity is Parity.EVEN:
        terms = c * np.cos(phase)
        slope = -np.sum(nc * np.sin(phase), axis=0)
    else:
        terms = c * np.sin(phase)
        slope = np.sum(nc * np.cos(phase), axis=0)
    return np.sum(terms, axis=0), slope, np.sum(np.abs(terms), axis=0)


def _trim(table: CoefficientTable) -> int:
    """Number of leading coefficients worth summing."""
    magnitude = np.abs(table.coeffs)
    significant = np.flatnonzero(magnitude > COEFFICIENT_FLOOR * magnitude.max())
    return max(int(significant[-1]) + 1, table.spec.leading_index + 1)


def _orders_needed(table: CoefficientTable, count: int) -> Tuple[np.ndarray, np.ndarray, int]:
    spec = table.spec
    m = (table.orders[:count] - spec.p) // 2
    lower, upper = m - spec.s, m + spec.t
    return lower, upper, int(max(np.max(np.abs(lower)), np.max(upper)))


def _radial_sum(table: CoefficientTable, form: _ProductForm, root: complex, mu: np.ndarray) -> SeriesValue:
    """Product series with the truncation widened until the last term is negligible."""
    for _ in range(3):
        result, last_term = _product_series(table, form, root, mu, with_tail=True)
        negligible = (last_term <= SERIES_TOLERANCE * np.abs(result.raw_value)) | (
            last_term <= 1e-16 * np.abs(result.magnitude)
        )
        if np.all(negligible):
            return result
        logger.debug("widening %r for the product series (last term %.3g)", table, np.max(last_term))
        table = fourier_coeffs(table.spec.parity, table.spec.r, table.q, min_terms=2 * table.M)
    return result


def _product_series(
    table: CoefficientTable,
    form: _ProductForm,
    root: complex,
    mu: np.ndarray,
    batches: Optional[Tuple[BesselBatch, BesselBatch]] = None,
    with_tail: bool = False,
):
    spec = table.spec
    count = _trim(table)
    lower, upper, n_max = _orders_needed(table, count)
    m = (table.orders[:count] - spec.p) // 2
    weights = table.coeffs[:count] / table.leading
    if form.alternate:
        weights = weights * np.where(m % 2 == 1, -1.0, 1.0)
    weights = _expand(weights, mu.ndim)

    x1, x2 = root * np.exp(-mu), root * np.exp(mu)
    if batches is None:
        scaled = form.outer in (_I, _K)
        batches = (bessel_batch(form.inner, x1, n_max), bessel_batch(form.outer, x2, n_max, scaled=scaled))
    inner, outer = batches

    sign = form.second_sign(spec.p)
    f_lo, f_hi = inner.values_at(lower), inner.values_at(upper)
    g_lo, g_hi = outer.values_at(lower), outer.values_at(upper)
    df_lo, df_hi = inner.derivatives_at(lower), inner.derivatives_at(upper)
    dg_lo, dg_hi = outer.derivatives_at(lower), outer.derivatives_at(upper)

    terms = weights * (f_lo * g_hi + sign * f_hi * g_lo)
    slopes = weights * (-x1 * (df_lo * g_hi + sign * df_hi * g_lo) + x2 * (f_lo * dg_hi + sign * f_hi * dg_lo))

    prefactor = spec.sigma * (-1.0 if form.phase and spec.s % 2 else 1.0)
    raw_value = prefactor * np.sum(terms, axis=0)
    raw_derivative = prefactor * np.sum(slopes, axis=0)
    unscale = _unscale(outer, x2)
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        value = unscale * raw_value
        derivative = unscale * raw_derivative
    if not (np.all(np.isfinite(value)) and np.all(np.isfinite(derivative))):
        raise BesselOverflowError(
            f"product series for order {spec.r} at q = {table.q} overflowed "
            f"(|x2| up to {np.max(np.abs(x2)):.6g})"
        )
    result = SeriesValue(
        value=value,
        derivative=derivative,
        raw_value=raw_value,
        raw_derivative=raw_derivative,
        unscale=unscale,
        magnitude=abs(prefactor) * np.sum(np.abs(terms), axis=0),
        slope_magnitude=abs(prefactor) * np.sum(np.abs(slopes), axis=0),
    )
    if with_tail:
        return result, abs(prefactor) * np.abs(terms[-1])
    return result


def _unscale(batch: BesselBatch, argument: np.ndarray) -> np.ndarray:
    if not batch.scaled:
        return np.ones_like(argument)
    with np.errstate(over="ignore", under="ignore"):
        if batch.family is _K:
            return np.exp(-argument)
        return np.exp(np.abs(argument.real))


def _continue_inward(
    table: CoefficientTable, form: _ProductForm, root: complex, target: float
) -> Tuple[complex, complex]:
    """Decaying solution at ``target`` from a well-conditioned series value further out.

    The decaying solution grows inward, so errors in the other solution are
    damped. The ODE is integrated for the solution times exp(E), with E set
    halfway between the start and end magnitudes so neither under- nor overflows.
    """
    start = target
    for _ in range(MAX_CONTINUATION_STEPS):
        start += CONTINUATION_STEP
        seed = _product_series(table, form, root, np.asarray(start, dtype=complex))
        if seed.condition <= CANCELLATION_LIMIT:
            break
    else:
        raise ConvergenceError(
            f"no well-conditioned matching point for the decaying order-{table.spec.r} solution",
            attempted=start,
        )
    logger.debug("continuing order-%d decaying solution inward from mu=%.3f", table.spec.r, start)

    x2 = root * math.exp(start)
    exponent = 0.5 * x2.real + abs(root)
    carried = cmath.exp(-x2 + exponent)
    alpha, q = table.alpha, table.q

    def rhs(mu: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], (alpha - 2.0 * q * math.cosh(2.0 * mu)) * y[0]])

    initial = np.array([complex(seed.raw_value) * carried, complex(seed.raw_derivative) * carried])
    solution = solve_ivp(
        rhs,
        (start, target),
        initial,
        method="DOP853",
        rtol=1e-12,
        atol=1e-15 * abs(initial[0]),
    )
    if not solution.success:
        raise ConvergenceError(f"inward continuation failed: {solution.message}", attempted=start)
    restore = math.exp(-exponent)
    return complex(solution.y[0, -1]) * restore, complex(solution.y[1, -1]) * restore


def _ratio_at(
    table: CoefficientTable, root: complex, theta: float, use_derivative: bool
) -> Tuple[complex, float]:
    """Angular-to-radial ratio at real theta and the worse of the two condition numbers."""
    value, slope, magnitude = _fourier_sum(table, np.asarray(theta))
    radial_part = _product_series(table, _FORMS[(table.spec.parity, "J")], root, np.asarray(-1j * theta))
    if use_derivative:
        slope_magnitude = float(np.sum(np.abs(table.orders * table.coeffs)))
        numerator = complex(slope)
        numerator_condition = _safe_ratio(slope_magnitude, numerator)
        denominator = -1j * complex(radial_part.derivative)
        denominator_condition = float(radial_part.slope_condition)
    else:
        numerator = complex(value)
        numerator_condition = _safe_ratio(float(magnitude), numerator)
        denominator = complex(radial_part.value)
        denominator_condition = float(radial_part.condition)
    if denominator == 0 or not np.isfinite(denominator_condition):
        return complex("nan"), math.inf
    return numerator / denominator, max(numerator_condition, denominator_condition)


def _safe_ratio(magnitude: float, value: complex) -> float:
    return magnitude / abs(value) if value != 0 else math.inf


def _match(parity: Parity, r: int, q: complex) -> JoiningFactor:
    table = fourier_coeffs(parity, r, q)
    root = principal_sqrt(q)
    best: Optional[Tuple[complex, float, float]] = None
    for theta in JOINING_POINTS:
        for use_derivative in (False, True):
            factor, condition = _ratio_at(table, root, theta, use_derivative)
            if best is None or condition < best[1]:
                best = (factor, condition, theta)
        if best[1] <= CANCELLATION_LIMIT:
            break
    factor, condition, theta = best
    if condition > CANCELLATION_LIMIT:
        logger.warning(
            "joining factor for %s order %d at q=%s is ill-conditioned (condition %.3g)",
            parity.value,
            r,
            q,
            condition,
        )
    elif theta != 0.0:
        logger.debug("joining factor for %s order %d at q=%s matched at theta=%.4f", parity.value, r, q, theta)
    return JoiningFactor(value=factor, theta=theta, shifted=theta != 0.0)
